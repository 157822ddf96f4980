"""Outward-rounded interval arithmetic on scalars, vectors and matrices.

Every operation returns an interval guaranteed to contain the exact real
result: endpoints are computed in double precision and widened outward by
one ulp, so correctness does not depend on platform rounding-mode support.

Besides the scalar primitives, this module evaluates the balanced-
configuration residual vector and the exact Jacobian of g(q) = J_f^T f(q)
over a coordinate box, which is what the Krawczyk certificate needs (the
Gauss-Newton surrogate J_f^T J_f alone would not be a true derivative
enclosure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nbody import Problem

_INF = math.inf


class IntervalDomainError(ValueError):
    """Division by an interval containing zero, sqrt of a negative, ..."""


class IntervalCollisionError(ValueError):
    """A pairwise distance interval contains zero: inconclusive box."""

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"distance between bodies {i} and {j} may vanish")


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: float) -> "Interval":
        x = float(x)
        return Interval(x, x)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def rad(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def inside_interior(self, other: "Interval") -> bool:
        """Strict inclusion at both ends (Krawczyk uniqueness test)."""
        return other.lo < self.lo and self.hi < other.hi

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) - self

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        p = (self.lo * other.lo, self.lo * other.hi,
             self.hi * other.lo, self.hi * other.hi)
        return Interval(_down(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _coerce(other)
        if other.lo <= 0.0 <= other.hi:
            raise IntervalDomainError("division by an interval containing 0")
        p = (self.lo / other.lo, self.lo / other.hi,
             self.hi / other.lo, self.hi / other.hi)
        return Interval(_down(min(p)), _up(max(p)))

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) / self

    def sqr(self) -> "Interval":
        if self.lo >= 0.0:
            return Interval(_down(self.lo * self.lo), _up(self.hi * self.hi))
        if self.hi <= 0.0:
            return Interval(_down(self.hi * self.hi), _up(self.lo * self.lo))
        m = max(-self.lo, self.hi)
        return Interval(0.0, _up(m * m))

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise IntervalDomainError("sqrt of an interval with negative part")
        return Interval(max(0.0, _down(math.sqrt(self.lo))),
                        _up(math.sqrt(self.hi)))

    def pow(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            raise IntervalDomainError("pow supports non-negative integers")
        if k == 0:
            return Interval.point(1.0)
        # square-and-multiply keeps even powers tight around zero
        result = None
        base = self
        e = k
        if e % 2 == 0:
            base = self.sqr()
            e //= 2
            while e % 2 == 0 and e > 1:
                base = base.sqr()
                e //= 2
        acc = base
        for _ in range(e - 1):
            acc = acc * base
        result = acc
        return result


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(float(x))


# functional aliases matching the operation names used elsewhere
def iv_add(a, b):
    return _coerce(a) + _coerce(b)


def iv_sub(a, b):
    return _coerce(a) - _coerce(b)


def iv_mul(a, b):
    return _coerce(a) * _coerce(b)


def iv_div(a, b):
    return _coerce(a) / _coerce(b)


def iv_sqrt(a):
    return _coerce(a).sqrt()


def iv_pow(a, k: int):
    return _coerce(a).pow(k)


class IntervalBox:
    """Vector of intervals; the enclosure [q]_r around a configuration."""

    def __init__(self, components):
        self.components = [_coerce(c) for c in components]

    @staticmethod
    def from_point(q) -> "IntervalBox":
        return IntervalBox([Interval.point(x) for x in np.asarray(q, float)])

    @staticmethod
    def from_point_radius(q, r: float) -> "IntervalBox":
        q = np.asarray(q, dtype=float)
        return IntervalBox(
            [Interval(_down(x - r), _up(x + r)) for x in q]
        )

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Interval:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def midpoint(self) -> np.ndarray:
        return np.array([c.mid for c in self.components])

    def radius(self) -> np.ndarray:
        return np.array([c.rad for c in self.components])


# ---------------------------------------------------------------------------
# interval matrix helpers (nested lists of Interval; dimensions are tiny)

def _zeros(rows: int, cols: int):
    z = Interval.point(0.0)
    return [[z] * cols for _ in range(rows)]


def _mat_tdot(a, b):
    """a^T b for interval matrices given as lists of rows."""
    rows = len(a[0])
    inner = len(a)
    cols = len(b[0])
    out = _zeros(rows, cols)
    for i in range(rows):
        for j in range(cols):
            acc = Interval.point(0.0)
            for k in range(inner):
                acc = acc + a[k][i] * b[k][j]
            out[i][j] = acc
    return out


def _mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def midpoint_matrix(a) -> np.ndarray:
    return np.array([[c.mid for c in row] for row in a])


def delta_matrix(a) -> list[list[Interval]]:
    """Remainder Delta = A - m(A); every component encloses zero."""
    out = []
    for row in a:
        mrow = []
        for c in row:
            m = c.mid
            mrow.append(Interval(_down(c.lo - m), _up(c.hi - m)))
        out.append(mrow)
    return out


# ---------------------------------------------------------------------------
# residual system over a box

def _pair_terms(p: Problem, box: IntervalBox):
    """Per-pair interval geometry shared by the residual and Jacobian
    evaluations: differences, distance powers, plus U and grad U."""
    n = p.n
    m2 = p.m * p.m
    zero = Interval.point(0.0)
    u = zero
    grad = [zero] * (2 * n)
    pairs = {}
    for i in range(n):
        for j in range(i + 1, n):
            dx = box[2 * j] - box[2 * i]
            dy = box[2 * j + 1] - box[2 * i + 1]
            r2 = dx.sqr() + dy.sqr()
            if r2.lo <= 0.0:
                raise IntervalCollisionError(i, j)
            r = r2.sqrt()
            r3 = r2 * r
            r5 = r3 * r2
            u = u + m2 / r
            gx = m2 * dx / r3
            gy = m2 * dy / r3
            grad[2 * i] = grad[2 * i] + gx
            grad[2 * i + 1] = grad[2 * i + 1] + gy
            grad[2 * j] = grad[2 * j] - gx
            grad[2 * j + 1] = grad[2 * j + 1] - gy
            pairs[(i, j)] = (dx, dy, r2, r3, r5)
    return u, grad, pairs


def _iv_residual_vector(p: Problem, box: IntervalBox, u, grad):
    s = p.s_diag()
    f = []
    for k in range(2 * p.n):
        f.append(grad[k] / p.m + u * (s[k] * box[k]))
    return f


def iv_residuals(p: Problem, box: IntervalBox) -> list[Interval]:
    """Componentwise enclosure of the residual vector over the box."""
    if len(box) != p.dim:
        raise ValueError(f"expected a box of dimension {p.dim}")
    u, grad, _ = _pair_terms(p, box)
    return _iv_residual_vector(p, box, u, grad)


def _iv_system(p: Problem, box: IntervalBox, constraint_index: int | None):
    """Enclosures of f, J_f and the exact J_g = J_f^T J_f + sum f_k H(f_k)
    over the box.  A constraint row f_extra = q[constraint_index] is
    appended when requested (central-mode rotation fixing)."""
    n = p.n
    dim = 2 * n
    m = p.m
    s = p.s_diag()
    zero = Interval.point(0.0)

    u, grad, pairs = _pair_terms(p, box)
    f = _iv_residual_vector(p, box, u, grad)

    # D^2 U blocks: D_ab = m^2/R^3 I - 3 m^2 (d d^T)/R^5, D_aa = -sum D_ab
    d2u = _zeros(dim, dim)
    m2 = m * m

    def add_block(bi, bj, b00, b01, b11, sign):
        if sign > 0:
            d2u[2 * bi][2 * bj] = d2u[2 * bi][2 * bj] + b00
            d2u[2 * bi][2 * bj + 1] = d2u[2 * bi][2 * bj + 1] + b01
            d2u[2 * bi + 1][2 * bj] = d2u[2 * bi + 1][2 * bj] + b01
            d2u[2 * bi + 1][2 * bj + 1] = d2u[2 * bi + 1][2 * bj + 1] + b11
        else:
            d2u[2 * bi][2 * bj] = d2u[2 * bi][2 * bj] - b00
            d2u[2 * bi][2 * bj + 1] = d2u[2 * bi][2 * bj + 1] - b01
            d2u[2 * bi + 1][2 * bj] = d2u[2 * bi + 1][2 * bj] - b01
            d2u[2 * bi + 1][2 * bj + 1] = d2u[2 * bi + 1][2 * bj + 1] - b11

    for (a, b), (dx, dy, r2, r3, r5) in pairs.items():
        i3 = m2 / r3
        i5 = 3.0 * m2 / r5
        b00 = i3 - i5 * dx.sqr()
        b11 = i3 - i5 * dy.sqr()
        b01 = zero - i5 * dx * dy
        add_block(a, b, b00, b01, b11, +1)
        add_block(b, a, b00, b01, b11, +1)
        add_block(a, a, b00, b01, b11, -1)
        add_block(b, b, b00, b01, b11, -1)

    # J_f = (1/m) D2U + (S q) (grad U)^T + U diag(S)
    rows = dim + (1 if constraint_index is not None else 0)
    jf = _zeros(rows, dim)
    for k in range(dim):
        sk_qk = s[k] * box[k]
        for l in range(dim):
            entry = d2u[k][l] / m + sk_qk * grad[l]
            if k == l:
                entry = entry + u * s[k]
            jf[k][l] = entry
    if constraint_index is not None:
        jf[dim][constraint_index] = Interval.point(1.0)

    fext = list(f)
    if constraint_index is not None:
        fext.append(box[constraint_index])

    # second-derivative contraction T = sum_k f_k Hess(f_k)
    # = (1/m) D3U.f + (f.Sq) D2U + (Sf) gradU^T + gradU (Sf)^T
    t = _zeros(dim, dim)

    # pair part (1/m) D3U.f
    for (a, b), (dx, dy, r2, r3, r5) in pairs.items():
        wx = f[2 * b] - f[2 * a]
        wy = f[2 * b + 1] - f[2 * a + 1]
        dw = dx * wx + dy * wy
        c = 3.0 * m2 / r5 / m
        # G = c [ dw (I - 5 d d^T / r2) + d w^T + w d^T ]
        five = 5.0 * dw / r2
        g00 = c * (dw - five * dx.sqr() + 2.0 * dx * wx)
        g11 = c * (dw - five * dy.sqr() + 2.0 * dy * wy)
        g01 = c * (dx * wy + dy * wx - five * dx * dy)

        def acc(bi, bj, sign):
            if sign > 0:
                t[2 * bi][2 * bj] = t[2 * bi][2 * bj] + g00
                t[2 * bi][2 * bj + 1] = t[2 * bi][2 * bj + 1] + g01
                t[2 * bi + 1][2 * bj] = t[2 * bi + 1][2 * bj] + g01
                t[2 * bi + 1][2 * bj + 1] = t[2 * bi + 1][2 * bj + 1] + g11
            else:
                t[2 * bi][2 * bj] = t[2 * bi][2 * bj] - g00
                t[2 * bi][2 * bj + 1] = t[2 * bi][2 * bj + 1] - g01
                t[2 * bi + 1][2 * bj] = t[2 * bi + 1][2 * bj] - g01
                t[2 * bi + 1][2 * bj + 1] = t[2 * bi + 1][2 * bj + 1] - g11

        acc(a, a, +1)
        acc(b, b, +1)
        acc(a, b, -1)
        acc(b, a, -1)

    # (f . S q) D2U
    fsq = zero
    for k in range(dim):
        fsq = fsq + f[k] * (s[k] * box[k])
    for k in range(dim):
        for l in range(dim):
            t[k][l] = t[k][l] + fsq * d2u[k][l]

    # (S f) gradU^T + gradU (S f)^T
    for k in range(dim):
        sfk = s[k] * f[k]
        for l in range(dim):
            t[k][l] = t[k][l] + sfk * grad[l] + grad[k] * (s[l] * f[l])

    jg = _mat_add(_mat_tdot(jf, jf), t)
    return fext, jf, jg


@dataclass
class JacobianEnclosure:
    enclosure: list[list[Interval]]
    midpoint: np.ndarray
    delta: list[list[Interval]]


def iv_jacobian_g(p: Problem, box: IntervalBox, mode: str = "balanced",
                  constraint_index: int | None = None) -> JacobianEnclosure:
    """Rigorous enclosure of the exact Jacobian of g(q) = J_f^T f(q) over
    the box, with the constraint row appended in central mode."""
    if mode not in ("central", "balanced"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "central" and constraint_index is None:
        # default: fix the rotation at the body of maximum radial distance
        mid = box.midpoint().reshape(p.n, 2)
        i0 = int(np.argmax(np.einsum("ij,ij->i", mid, mid)))
        constraint_index = 2 * i0 + 1
    if mode == "balanced":
        constraint_index = None
    _, _, jg = _iv_system(p, box, constraint_index)
    return JacobianEnclosure(
        enclosure=jg, midpoint=midpoint_matrix(jg), delta=delta_matrix(jg)
    )


def iv_gradient_g(p: Problem, box: IntervalBox,
                  constraint_index: int | None = None) -> list[Interval]:
    """Enclosure of g = J_f^T f over the box (point boxes give the
    rounding-rigorous gradient at a configuration)."""
    f, jf, _ = _iv_system(p, box, constraint_index)
    dim = p.dim
    g = []
    for i in range(dim):
        acc = Interval.point(0.0)
        for k in range(len(f)):
            acc = acc + jf[k][i] * f[k]
        g.append(acc)
    return g
