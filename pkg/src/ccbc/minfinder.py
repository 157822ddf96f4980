"""Multistart clustering search: sampling, start-point filtering, typical
distance bookkeeping, the distinct-solution registry and the stopping
rules.

The outer loop walks K disjoint sample subsets of size ns0.  A sample
becomes a start point unless it is closer than d_min(Q0) to a minimum
already located in the current subset (C1) or closer than the typical
distance r_t = R_t / L to an earlier sample (C2).  Distinct solutions are
keyed by their sorted mutual-distance signature.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg, nbody
from .localsearch import SearchOptions, SearchResult, minimize
from .nbody import Problem
from .sampling import DoubleBox, SamplerKind, make_sampler

_C2_CHUNK = 4096


@dataclass(frozen=True)
class RunConfig:
    ns0: int = 1000
    k_max: int = 1000
    k_star: int = 100
    eps_db: float = 1e-4
    stop_rule: str = "stagnation"  # or "double_box"
    sampler: SamplerKind = SamplerKind("faure", 0)
    root_tol: float = 1e-20
    degen_tol: float = 1e-15
    match_tol: float = 1e-6
    c1_on_global: bool = False  # prose-variant switch: C1 against global Q
    search: SearchOptions = field(default_factory=SearchOptions)

    def __post_init__(self):
        if not (1 <= self.k_star <= self.k_max):
            raise ValueError("need 1 <= k_star <= k_max")
        for name in ("root_tol", "degen_tol", "match_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.stop_rule not in ("stagnation", "double_box"):
            raise ValueError(f"unknown stop rule {self.stop_rule!r}")


@dataclass
class Solution:
    point: np.ndarray
    objective: float
    eigenvalues: np.ndarray
    signature: np.ndarray
    morse_index: int | None = None
    isotropy_index: object = None  # Fraction once verified
    degenerate: bool = False
    certificate: object = None
    report: object = None


class SolutionSet:
    """Registry of distinct solutions under the sorted-distance signature
    equivalence."""

    def __init__(self, match_tol: float = 1e-6):
        self.match_tol = match_tol
        self.entries: list[Solution] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def signatures(self) -> list[np.ndarray]:
        return [e.signature for e in self.entries]

    def contains_signature(self, sig) -> bool:
        return any(
            is_equivalent(sig, e.signature, self.match_tol) for e in self.entries
        )

    def try_insert(self, sol: Solution) -> bool:
        if self.contains_signature(sol.signature):
            return False
        self.entries.append(sol)
        return True

    def sorted_entries(self) -> list[Solution]:
        return sorted(self.entries, key=lambda e: tuple(e.signature))


@dataclass
class RunStats:
    n_solutions: int = 0
    n_degenerate: int = 0
    k_used: int = 0
    k0: int = 0
    n_samples: int = 0
    n_local_searches: int = 0
    n_failures: int = 0
    wall_time_s: float = 0.0
    stop_reason: str = ""
    double_box_mean: float | None = None
    double_box_variance: float | None = None


@dataclass
class RunResult:
    solutions: SolutionSet
    degenerate: list[Solution]
    stats: RunStats


def signature(p: Problem, q) -> np.ndarray:
    """Sorted mutual distances: invariant under permutation, rotation and
    reflection of the configuration."""
    pts = nbody.as_points(p, q)
    diff = pts[np.newaxis, :, :] - pts[:, np.newaxis, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(p.n, 1)
    return np.sort(dist[iu])


def is_equivalent(sig1, sig2, match_tol: float = 1e-6) -> bool:
    """Relative-absolute distance matching on sorted signatures."""
    sig1 = np.asarray(sig1, dtype=float)
    sig2 = np.asarray(sig2, dtype=float)
    if sig1.shape != sig2.shape:
        raise ValueError("signature length mismatch")
    bound = match_tol * (1.0 + np.maximum(np.abs(sig1), np.abs(sig2)))
    return bool(np.all(np.abs(sig1 - sig2) <= bound))


def is_start_point(s, located_minima, prior_samples, L: int, R_t: float) -> bool:
    """Reference implementation of the start-point filter (the run loop
    uses an equivalent chunked version)."""
    s = np.asarray(s, dtype=float)
    minima = [np.asarray(mq, dtype=float) for mq in located_minima]
    if len(minima) >= 2:
        arr = np.vstack(minima)
        pair = arr[:, None, :] - arr[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", pair, pair))
        np.fill_diagonal(d, np.inf)
        d_min = d.min()
        if np.min(np.linalg.norm(arr - s, axis=1)) < d_min:
            return False
    if L > 0 and len(prior_samples) > 0:
        r_t = R_t / L
        arr = np.asarray(prior_samples, dtype=float)
        if np.min(np.linalg.norm(arr - s, axis=1)) < r_t:
            return False
    return True


class _SampleStore:
    """Append-only sample history with a chunked any-within-radius query
    (early exit keeps the quadratic scan cheap in practice)."""

    def __init__(self, dim: int, capacity: int):
        self._buf = np.empty((capacity, dim))
        self._n = 0

    def append(self, s: np.ndarray):
        if self._n == self._buf.shape[0]:
            self._buf = np.vstack([self._buf, np.empty_like(self._buf)])
        self._buf[self._n] = s
        self._n += 1

    def any_within(self, s: np.ndarray, radius: float) -> bool:
        r2 = radius * radius
        for start in range(0, self._n, _C2_CHUNK):
            chunk = self._buf[start:min(start + _C2_CHUNK, self._n)]
            d2 = np.einsum("ij,ij->i", chunk - s, chunk - s)
            if d2.min(initial=np.inf) < r2:
                return True
        return False


class _SubsetMinima:
    """Per-subset located minima with an incrementally maintained minimum
    pairwise distance d_min(Q0)."""

    def __init__(self, dim: int):
        self._pts = np.empty((0, dim))
        self.d_min = np.inf

    def __len__(self):
        return self._pts.shape[0]

    def add(self, q: np.ndarray):
        if self._pts.shape[0]:
            d = np.linalg.norm(self._pts - q, axis=1).min()
            self.d_min = min(self.d_min, float(d))
        self._pts = np.vstack([self._pts, q])

    def too_close(self, s: np.ndarray) -> bool:
        if self._pts.shape[0] < 2:
            return False
        d = np.linalg.norm(self._pts - s, axis=1).min()
        return bool(d < self.d_min)


def _screen(p: Problem, cfg: RunConfig, res: SearchResult) -> Solution:
    """Build a Solution record with the eigenvalue degeneracy screen."""
    eig = linalg.sym_eigenvalues(nbody.hessian(p, res.point))
    screen_val = abs(eig[1]) if p.central else abs(eig[0])
    return Solution(
        point=res.point.copy(),
        objective=res.objective,
        eigenvalues=eig,
        signature=signature(p, res.point),
        degenerate=bool(screen_val < cfg.degen_tol),
    )


def run(p: Problem, cfg: RunConfig) -> RunResult:
    """Execute the full multistart search (Minfinder-style outer loop)."""
    t0 = time.perf_counter()
    lo, hi = p.bounds()
    dim = p.dim
    stats = RunStats()
    solutions = SolutionSet(cfg.match_tol)
    degenerate: list[Solution] = []
    history: list[int] = []

    double_box = None
    use_db_points = False
    sampler = None
    if cfg.stop_rule == "double_box":
        double_box = DoubleBox((lo, hi), cfg.ns0, seed=cfg.sampler.seed)
        use_db_points = cfg.sampler.tag == "pseudo_random"
    if not use_db_points:
        sampler = make_sampler(cfg.sampler, dim, (lo, hi))

    L = 0
    R_t = 0.0

    for k in range(1, cfg.k_max + 1):
        if double_box is not None:
            db_points = double_box.draw(cfg.ns0)
            batch = db_points if use_db_points else sampler.next_batch(cfg.ns0)
        else:
            batch = sampler.next_batch(cfg.ns0)

        # C1/C2 closeness is scoped to the current subset, mirroring the
        # per-subset Q0 of the outer loop.
        store = _SampleStore(dim, cfg.ns0)
        subset_minima = _SubsetMinima(dim)
        for s in batch:
            stats.n_samples += 1
            start = True
            if cfg.c1_on_global:
                if len(solutions) >= 2:
                    pts = np.vstack([e.point for e in solutions.entries])
                    pair = pts[:, None, :] - pts[None, :, :]
                    d = np.sqrt(np.einsum("ijk,ijk->ij", pair, pair))
                    np.fill_diagonal(d, np.inf)
                    if np.linalg.norm(pts - s, axis=1).min() < d.min():
                        start = False
            elif subset_minima.too_close(s):
                start = False
            if start and L > 0:
                if store.any_within(s, R_t / L):
                    start = False
            store.append(s)
            if not start:
                continue

            res = minimize(p, s, cfg.search)
            stats.n_local_searches += 1
            if res.status == "failure" or not np.isfinite(res.objective):
                stats.n_failures += 1
                continue
            subset_minima.add(res.point)
            L += 1
            R_t += float(np.linalg.norm(s - res.point))

            if res.objective >= cfg.root_tol:
                continue  # spurious local minimum, discarded
            sig = signature(p, res.point)
            if solutions.contains_signature(sig):
                continue
            sol = _screen(p, cfg, res)
            if sol.degenerate:
                if not any(
                    is_equivalent(sol.signature, d.signature, cfg.match_tol)
                    for d in degenerate
                ):
                    degenerate.append(sol)
                continue
            solutions.try_insert(sol)

        history.append(len(solutions))
        stats.k_used = k
        if double_box is not None:
            stats.double_box_mean = double_box.state.mean
            stats.double_box_variance = double_box.state.variance

        if cfg.stop_rule == "double_box":
            if k >= 2 and double_box.state.variance < cfg.eps_db:
                stats.stop_reason = "double_box"
                break
        else:
            if k >= cfg.k_star and len(set(history[-cfg.k_star:])) == 1:
                stats.stop_reason = "stagnation"
                break
    else:
        stats.stop_reason = "k_max"

    stats.n_solutions = len(solutions)
    stats.n_degenerate = len(degenerate)
    final = len(solutions)
    stats.k0 = next((i + 1 for i, v in enumerate(history) if v == final), 0)
    stats.wall_time_s = time.perf_counter() - t0
    return RunResult(solutions=solutions, degenerate=degenerate, stats=stats)
