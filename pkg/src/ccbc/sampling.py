"""Sample-point generation inside the search box.

Five interchangeable strategies (pseudo-random, chaotic logistic map,
Faure, Sobol, Latin hypercube), all deterministic for a fixed
(tag, seed, dimension), plus the Double-Box statistics used by the
corresponding stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

_TAGS = ("pseudo_random", "chaotic", "faure", "sobol", "latin_hypercube")

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
           53, 59, 61, 67, 71, 73, 79, 83, 89, 97)

_MAX_LOW_DISCREPANCY_DIM = 64


class SamplerConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SamplerKind:
    tag: str
    seed: int = 0

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise SamplerConfigError(
                f"unknown sampler {self.tag!r}; expected one of {_TAGS}"
            )


def _check_box(box) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    if lo.shape != hi.shape or np.any(lo > hi):
        raise SamplerConfigError("empty or malformed box")
    return lo, hi


class Sampler:
    """Stateful point stream; batch k yields points (k-1)*count+1 .. k*count
    of the underlying sequence."""

    def __init__(self, kind: SamplerKind, dim: int, box):
        self.kind = kind
        self.dim = dim
        self.lo, self.hi = _check_box(box)
        if self.lo.shape != (dim,):
            raise SamplerConfigError("box dimension mismatch")

    def _unit_batch(self, count: int) -> np.ndarray:
        raise NotImplementedError

    def next_batch(self, count: int) -> np.ndarray:
        if count < 0:
            raise SamplerConfigError("count must be non-negative")
        if count == 0:
            return np.empty((0, self.dim))
        u = self._unit_batch(count)
        return self.lo + u * (self.hi - self.lo)


class PseudoRandomSampler(Sampler):
    def __init__(self, kind, dim, box):
        super().__init__(kind, dim, box)
        self._rng = np.random.default_rng(kind.seed)

    def _unit_batch(self, count):
        return self._rng.random((count, self.dim))


class ChaoticSampler(Sampler):
    """Logistic map x <- 4x(1-x) per coordinate, seeded offsets per
    dimension, 100-iteration burn-in; fixed points {0, 1} re-seeded."""

    BURN_IN = 100

    def __init__(self, kind, dim, box):
        super().__init__(kind, dim, box)
        self._rng = np.random.default_rng(kind.seed)
        self._state = self._fresh(dim)
        for _ in range(self.BURN_IN):
            self._advance()

    def _fresh(self, size):
        x = self._rng.random(size)
        while np.any((x <= 0.0) | (x >= 1.0)):
            bad = (x <= 0.0) | (x >= 1.0)
            x[bad] = self._rng.random(int(bad.sum()))
        return x

    def _advance(self):
        x = self._state
        x = 4.0 * x * (1.0 - x)
        bad = (x <= 0.0) | (x >= 1.0)
        if np.any(bad):
            x[bad] = self._fresh(int(bad.sum()))
        self._state = x

    def _unit_batch(self, count):
        out = np.empty((count, self.dim))
        for r in range(count):
            self._advance()
            out[r] = self._state
        return out


class FaureSampler(Sampler):
    """Faure sequence in the smallest prime base >= dim; dimension j applies
    the j-th power of the Pascal matrix (mod base) to the base-b digits."""

    DIGITS = 48  # enough for ~1e9 points in base 2, fewer needed above

    def __init__(self, kind, dim, box):
        super().__init__(kind, dim, box)
        base = next((b for b in _PRIMES if b >= dim), None)
        if base is None or dim > _MAX_LOW_DISCREPANCY_DIM:
            raise SamplerConfigError(
                f"faure sequence not tabulated for dimension {dim}"
            )
        self.base = base
        # skip the all-zero point; the seed offsets the stream so repeated
        # runs with distinct seeds explore different stretches
        self._index = 1 + 12289 * int(kind.seed)
        ndig = int(np.ceil(np.log(2**48) / np.log(base)))
        pascal = np.zeros((ndig, ndig), dtype=np.int64)
        for l in range(ndig):
            pascal[l, 0] = 1
            for k in range(1, l + 1):
                pascal[l, k] = (pascal[l - 1, k - 1] + pascal[l - 1, k]) % base
        # per-dimension digit transform C(l, k) j^(l-k) mod base
        self._mats = []
        for j in range(dim):
            mat = np.zeros((ndig, ndig), dtype=np.int64)
            jp = np.ones(ndig, dtype=np.int64)
            for e in range(1, ndig):
                jp[e] = (jp[e - 1] * j) % base
            for l in range(ndig):
                for k in range(l + 1):
                    mat[l, k] = (pascal[l, k] * jp[l - k]) % base
            self._mats.append(mat)
        self._ndig = ndig
        self._weights = (1.0 / base) ** np.arange(1, ndig + 1)

    def _unit_batch(self, count):
        idx = np.arange(self._index, self._index + count, dtype=np.int64)
        self._index += count
        digits = np.empty((count, self._ndig), dtype=np.int64)
        rem = idx.copy()
        for k in range(self._ndig):
            digits[:, k] = rem % self.base
            rem //= self.base
        out = np.empty((count, self.dim))
        for j in range(self.dim):
            tr = (digits @ self._mats[j]) % self.base
            out[:, j] = tr @ self._weights
        return out


class SobolSampler(Sampler):
    def __init__(self, kind, dim, box):
        super().__init__(kind, dim, box)
        if dim > _MAX_LOW_DISCREPANCY_DIM:
            raise SamplerConfigError(
                f"sobol direction numbers not tabulated for dimension {dim}"
            )
        self._engine = qmc.Sobol(d=dim, scramble=True, seed=kind.seed)

    def _unit_batch(self, count):
        return self._engine.random(count)


class LatinHypercubeSampler(Sampler):
    def __init__(self, kind, dim, box):
        super().__init__(kind, dim, box)
        self._engine = qmc.LatinHypercube(d=dim, seed=kind.seed)

    def _unit_batch(self, count):
        return self._engine.random(count)


_SAMPLERS = {
    "pseudo_random": PseudoRandomSampler,
    "chaotic": ChaoticSampler,
    "faure": FaureSampler,
    "sobol": SobolSampler,
    "latin_hypercube": LatinHypercubeSampler,
}


def make_sampler(kind: SamplerKind, dim: int, box) -> Sampler:
    return _SAMPLERS[kind.tag](kind, dim, box)


def next_batch(kind: SamplerKind, dim: int, count: int, box) -> np.ndarray:
    """One-shot batch from a fresh stream (stateless convenience)."""
    return make_sampler(kind, dim, box).next_batch(count)


@dataclass
class DoubleBoxState:
    """Running statistics of the in-box hit fraction delta when drawing
    from the concentric doubled box B2 (mu(B2) = 2 mu(B))."""

    k: int = 0
    m_k: int = 0
    delta_history: list = field(default_factory=list)
    mean: float = 0.0
    variance: float = 0.0


class DoubleBox:
    """Uniform sampling of B2 until the requested number of points falls
    in B; each side of B2 is the side of B scaled by 2^(1/dim)."""

    def __init__(self, box, count_per_iteration: int, seed: int = 0):
        self.lo, self.hi = _check_box(box)
        self.dim = len(self.lo)
        self.count = count_per_iteration
        mid = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo) * 2.0 ** (1.0 / self.dim)
        self.lo2, self.hi2 = mid - half, mid + half
        self._rng = np.random.default_rng(seed)
        self.state = DoubleBoxState()

    def draw(self, count: int | None = None) -> np.ndarray:
        """Draw until `count` points land in B; returns those points and
        updates the delta statistics."""
        if count is None:
            count = self.count
        st = self.state
        if count == 0:
            return np.empty((0, self.dim))
        hits: list[np.ndarray] = []
        got = 0
        while got < count:
            chunk = max(count - got, 64)
            pts = self._rng.uniform(self.lo2, self.hi2, size=(chunk, self.dim))
            inside = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
            take = pts[inside]
            need = count - got
            if take.shape[0] > need:
                # return the surplus draws: only count draws up to the one
                # producing the final in-B point
                idx = np.flatnonzero(inside)[need - 1]
                st.m_k += int(idx) + 1
                take = take[:need]
            else:
                st.m_k += chunk
            got += take.shape[0]
            hits.append(take)
        st.k += 1
        delta = st.k * self.count / st.m_k
        st.delta_history.append(delta)
        hist = np.asarray(st.delta_history)
        st.mean = float(hist.mean())
        st.variance = float(((hist - st.mean) ** 2).mean())
        return np.vstack(hits)


def double_box_batch(state_box: DoubleBox, count: int) -> tuple[np.ndarray, DoubleBoxState]:
    """Functional wrapper over DoubleBox.draw."""
    pts = state_box.draw(count)
    return pts, state_box.state
