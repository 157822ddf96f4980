"""Closed-form evaluation of the planar n-body force function and the
residual system whose roots are central / balanced configurations.

Coordinates are stored interleaved, ``q = (x1, y1, ..., xn, yn)``, so the
2x2 block structure of the Hessian and the residual Jacobian is index-free.
All functions are pure; equal masses throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Mutual distances below this are treated as collisions and raised, never
# silently turned into huge finite values.
COLLISION_TOL = 1e-12


class CollisionError(ValueError):
    """Two bodies (nearly) coincide; the potential is singular there."""

    def __init__(self, i: int, j: int, distance: float):
        self.pair = (i, j)
        self.distance = distance
        super().__init__(
            f"bodies {i} and {j} collide (distance {distance:.3e})"
        )


class DegenerateConfigurationError(ValueError):
    """All bodies coincide with the center; no normalization exists."""


@dataclass(frozen=True)
class Problem:
    """Equal-mass planar problem with diagonal weight matrix S.

    The search box follows from the inertia normalization: every root of
    the residual system has m*sigma_x*x_i**2 <= 1 (and similarly in y), so
    the bounds are +-1/sqrt(m*sigma) per coordinate.
    """

    n: int
    m: float = 1.0
    sigma_x: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 bodies, got n={self.n}")
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got m={self.m}")
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError(
                f"S must be positive definite, got "
                f"sigma_x={self.sigma_x}, sigma_y={self.sigma_y}"
            )

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def central(self) -> bool:
        return self.sigma_x == self.sigma_y

    def s_diag(self) -> np.ndarray:
        """Diagonal of S repeated per body (length 2n)."""
        return np.tile([self.sigma_x, self.sigma_y], self.n)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-coordinate (lower, upper) search box."""
        hi = 1.0 / np.sqrt(self.m * self.s_diag())
        return -hi, hi


@dataclass(frozen=True)
class DerivedScalars:
    potential: float
    lam: float
    inertia: float
    center: np.ndarray


def as_points(p: Problem, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (p.dim,):
        raise ValueError(f"expected coordinate vector of length {p.dim}")
    return q.reshape(p.n, 2)


def _pair_geometry(p: Problem, q):
    """Points, pairwise difference tensor and distance matrix.

    diff[i, j] = q_j - q_i.  The distance diagonal is set to inf so that
    vectorized sums over j != i need no masking.  Raises on collision.
    """
    pts = as_points(p, q)
    diff = pts[np.newaxis, :, :] - pts[:, np.newaxis, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, np.inf)
    k = int(np.argmin(dist))
    i, j = divmod(k, p.n)
    if dist[i, j] < COLLISION_TOL:
        raise CollisionError(i, j, float(dist[i, j]))
    return pts, diff, dist


def potential(p: Problem, q) -> float:
    """Newtonian force function U = sum_{i<j} m^2 / R_ij."""
    _, _, dist = _pair_geometry(p, q)
    inv = 1.0 / dist
    return float(p.m**2 * np.sum(np.triu(inv, 1)))


def gradient(p: Problem, q) -> np.ndarray:
    """Gradient of U; block i is sum_{j!=i} m^2 (q_j - q_i) / R_ij^3."""
    _, diff, dist = _pair_geometry(p, q)
    w = p.m**2 / dist**3
    return np.einsum("ij,ijk->ik", w, diff).reshape(p.dim)


def center_of_mass(p: Problem, q) -> np.ndarray:
    return as_points(p, q).mean(axis=0)


def moment_of_inertia(p: Problem, q) -> float:
    pts = as_points(p, q)
    rel = pts - pts.mean(axis=0)
    s = np.array([p.sigma_x, p.sigma_y])
    return float(p.m * np.sum(rel**2 * s))


def derived_scalars(p: Problem, q) -> DerivedScalars:
    u = potential(p, q)
    i_s = moment_of_inertia(p, q)
    return DerivedScalars(
        potential=u, lam=u / i_s, inertia=i_s, center=center_of_mass(p, q)
    )


def normalize(p: Problem, q) -> np.ndarray:
    """Translate the center of mass to the origin and scale to I_S = 1."""
    _pair_geometry(p, q)  # collision guard
    pts = as_points(p, q)
    c = pts.mean(axis=0)
    i_s = moment_of_inertia(p, q)
    if i_s < 1e-300:
        raise DegenerateConfigurationError("all bodies coincide with the center")
    return ((pts - c) / np.sqrt(i_s)).reshape(p.dim)


def residuals(p: Problem, q) -> np.ndarray:
    """Residual vector f whose roots are normalized BC(S) configurations.

    f_{2i-1} = sum_{j!=i} m (x_j - x_i)/R_ij^3 + U sigma_x x_i and the
    analogous y component.  Equals (1/m) grad U + U * S q.
    """
    q = np.asarray(q, dtype=float)
    u = potential(p, q)
    return gradient(p, q) / p.m + u * p.s_diag() * q


def _d2u(p: Problem, q) -> np.ndarray:
    """Second derivative matrix of U with the standard diagonal blocks
    D_ii = -sum_{j!=i} D_ij (required for translation invariance)."""
    _, diff, dist = _pair_geometry(p, q)
    n = p.n
    m2 = p.m**2
    inv3 = m2 / dist**3
    inv5 = m2 / dist**5
    eye = np.eye(2)
    outer = np.einsum("ijk,ijl->ijkl", diff, diff)
    blocks = inv3[:, :, None, None] * eye - 3.0 * inv5[:, :, None, None] * outer
    idx = np.arange(n)
    blocks[idx, idx] = 0.0
    blocks[idx, idx] = -blocks.sum(axis=1)
    return blocks.transpose(0, 2, 1, 3).reshape(p.dim, p.dim)


def residual_jacobian(p: Problem, q) -> np.ndarray:
    """Analytic Jacobian of the residual vector:
    J_f = (1/m) D^2 U + (S q) (grad U)^T + U * S."""
    q = np.asarray(q, dtype=float)
    s = p.s_diag()
    u = potential(p, q)
    g = gradient(p, q)
    return _d2u(p, q) / p.m + np.outer(s * q, g) + u * np.diag(s)


def hessian(p: Problem, q) -> np.ndarray:
    """Hessian of the restricted potential at a critical point:
    H = D^2 U + U * S_hat * M (equal masses: S_hat M = m diag(S))."""
    q = np.asarray(q, dtype=float)
    u = potential(p, q)
    return _d2u(p, q) + u * p.m * np.diag(p.s_diag())


def residuals_batch(p: Problem, qs: np.ndarray) -> np.ndarray:
    """Residual vectors for a (B, 2n) batch of configurations.

    Collisions are not raised here; rows containing a collision yield
    non-finite entries the caller can mask.
    """
    qs = np.asarray(qs, dtype=float)
    pts = qs.reshape(qs.shape[0], p.n, 2)
    diff = pts[:, np.newaxis, :, :] - pts[:, :, np.newaxis, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.sqrt(np.einsum("bijk,bijk->bij", diff, diff))
        idx = np.arange(p.n)
        dist[:, idx, idx] = np.inf
        u = p.m**2 * 0.5 * np.sum(1.0 / dist, axis=(1, 2))
        grad = np.einsum("bij,bijk->bik", p.m**2 / dist**3, diff)
    return grad.reshape(qs.shape) / p.m + u[:, None] * p.s_diag() * qs
