"""Small dense linear algebra for systems up to a few hundred unknowns:
cyclic-Jacobi symmetric eigendecomposition, LU solves and inversion.

Matrices here are tiny (at most 2n+1 for the body counts of interest), so
robustness and deterministic behaviour win over speed.
"""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ValueError):
    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(
            f"matrix singular to tolerance at pivot {pivot_index} "
            f"(magnitude {abs(pivot):.3e})"
        )


def _check_finite(a: np.ndarray):
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")


def _abs_sort(vals: np.ndarray, vecs: np.ndarray | None):
    # |lambda| ascending; among equal magnitudes the negative value first,
    # which keeps the "skip lambda_1" Morse rule deterministic.
    order = np.lexsort((vals >= 0, np.abs(vals)))
    if vecs is None:
        return vals[order]
    return vals[order], vecs[:, order]


def jacobi_eigh(a, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors) sorted
    by absolute value ascending (columns of the vector matrix match)."""
    a = np.array(a, dtype=float, copy=True)
    _check_finite(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.abs(a).max()
    if scale == 0.0 or n == 1:
        return _abs_sort(np.diag(a).copy(), v)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= 1e-15 * scale * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return _abs_sort(np.diag(a).copy(), v)


def sym_eigenvalues(a) -> np.ndarray:
    """Full spectrum of a symmetric matrix, |lambda| ascending."""
    vals, _ = jacobi_eigh(a)
    return vals


def _lu_factor(a: np.ndarray):
    a = np.array(a, dtype=float, copy=True)
    _check_finite(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expected a square matrix")
    piv = np.arange(n)
    tol = 1e-14 * max(1.0, np.abs(a).max())
    for k in range(n):
        r = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[r, k]) <= tol:
            raise SingularMatrixError(k, float(a[r, k]))
        if r != k:
            a[[k, r]] = a[[r, k]]
            piv[[k, r]] = piv[[r, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, piv


def solve(a, b) -> np.ndarray:
    """Solve a x = b by LU with partial pivoting."""
    lu, piv = _lu_factor(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    x = b[piv].astype(float, copy=True)
    n = lu.shape[0]
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def invert(a) -> np.ndarray:
    """Matrix inverse, columnwise via the LU solve."""
    a = np.asarray(a, dtype=float)
    lu, piv = _lu_factor(a)
    n = a.shape[0]
    inv = np.empty((n, n))
    eye = np.eye(n)
    for col in range(n):
        x = eye[piv, col].copy()
        for k in range(1, n):
            x[k] -= lu[k, :k] @ x[:k]
        for k in range(n - 1, -1, -1):
            x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
        inv[:, col] = x
    return inv


def determinant(a) -> float:
    """Determinant via the LU factorization (sign from the pivoting)."""
    a = np.asarray(a, dtype=float)
    try:
        lu, piv = _lu_factor(a)
    except SingularMatrixError:
        return 0.0
    sign = 1.0
    seen = np.arange(len(piv))
    # permutation parity of piv
    perm = list(piv)
    visited = [False] * len(perm)
    for i in range(len(perm)):
        if visited[i]:
            continue
        j, cycle = i, 0
        while not visited[j]:
            visited[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    del seen
    return float(sign * np.prod(np.diag(lu)))
