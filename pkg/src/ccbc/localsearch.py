"""Deterministic bound-constrained nonlinear least-squares minimizer.

Levenberg-Marquardt damped Gauss-Newton with trial points projected onto
the search box.  A single in-house solver; the residual Jacobian is
analytic, so damping plus projection is enough for the well-conditioned
systems this package solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nbody
from .nbody import CollisionError, Problem


@dataclass(frozen=True)
class SearchOptions:
    max_iterations: int = 200
    root_tol: float = 1e-20
    gradient_tol: float = 1e-12
    damping_init: float = 1e-3
    damping_min: float = 1e-12
    damping_max: float = 1e8
    step_tol: float = 1e-16


@dataclass
class SearchResult:
    point: np.ndarray
    objective: float
    iterations: int
    status: str  # converged_root | converged_stationary | iteration_cap | failure


def _objective(p: Problem, q) -> tuple[float, np.ndarray]:
    f = nbody.residuals(p, q)
    return 0.5 * float(f @ f), f


def _projected_gradient_norm(g, q, lo, hi) -> float:
    pg = g.copy()
    at_lo = q <= lo
    at_hi = q >= hi
    pg[at_lo] = np.minimum(g[at_lo], 0.0)
    pg[at_hi] = np.maximum(g[at_hi], 0.0)
    return float(np.linalg.norm(pg))


def minimize(p: Problem, start, opts: SearchOptions | None = None) -> SearchResult:
    opts = opts or SearchOptions()
    lo, hi = p.bounds()
    q = np.clip(np.asarray(start, dtype=float), lo, hi)

    try:
        big_f, f = _objective(p, q)
    except CollisionError:
        return SearchResult(q, np.inf, 0, "failure")
    if not np.isfinite(big_f):
        return SearchResult(q, np.inf, 0, "failure")
    if big_f < opts.root_tol:
        return SearchResult(q, big_f, 0, "converged_root")

    mu = opts.damping_init
    for it in range(1, opts.max_iterations + 1):
        jac = nbody.residual_jacobian(p, q)
        g = jac.T @ f
        jtj = jac.T @ jac
        if _projected_gradient_norm(g, q, lo, hi) < opts.gradient_tol:
            status = "converged_root" if big_f < opts.root_tol else "converged_stationary"
            return SearchResult(q, big_f, it, status)

        diag = np.diag(jtj).copy()
        diag[diag < 1e-30] = 1e-30
        accepted = False
        while mu <= opts.damping_max:
            try:
                step = np.linalg.solve(jtj + mu * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                mu *= 4.0
                continue
            trial = np.clip(q + step, lo, hi)
            if np.linalg.norm(trial - q) < opts.step_tol * (1.0 + np.linalg.norm(q)):
                status = "converged_root" if big_f < opts.root_tol else "converged_stationary"
                return SearchResult(q, big_f, it, status)
            try:
                big_f_trial, f_trial = _objective(p, trial)
            except CollisionError:
                big_f_trial = np.inf
            if np.isfinite(big_f_trial) and big_f_trial < big_f:
                q, big_f, f = trial, big_f_trial, f_trial
                mu = max(mu * 0.25, opts.damping_min)
                accepted = True
                break
            mu *= 4.0
        if not accepted:
            # damping exhausted without progress: report the best point
            status = "converged_root" if big_f < opts.root_tol else "converged_stationary"
            return SearchResult(q, big_f, it, status)
        if big_f < opts.root_tol:
            return SearchResult(q, big_f, it, "converged_root")

    return SearchResult(q, big_f, opts.max_iterations, "iteration_cap")
