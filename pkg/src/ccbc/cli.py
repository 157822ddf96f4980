"""Command-line front end: parse flags and optional config file, run the
multistart search, verify the solutions, and write per-solution reports,
a CSV summary and optional SVG plots.

Exit codes: 0 success, 2 configuration error, 1 internal failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import minfinder, nbody, verify
from .localsearch import SearchOptions
from .minfinder import RunConfig, RunResult
from .nbody import Problem
from .sampling import SamplerKind

SUMMARY_HEADER = "n,sigma_x,sigma_y,N_sol,Ns0,K,k_star,k0,wall_time_s,sampler,seed"

_SAMPLER_CHOICES = ("pseudo_random", "chaotic", "faure", "sobol", "latin_hypercube")


class ConfigurationError(ValueError):
    pass


def _fmt(x: float) -> str:
    """Shortest round-trip decimal (17 significant digits)."""
    return repr(float(x))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccbc",
        description="Find and verify planar central and balanced "
        "configurations of the equal-mass n-body problem.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--n", type=int, required=False, help="number of bodies")
        sp.add_argument("--mass", type=float, default=None, help="common mass m")
        sp.add_argument("--sigma-x", type=float, default=None)
        sp.add_argument("--sampler", choices=_SAMPLER_CHOICES, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--ns0", type=int, default=None,
                        help="samples per subset")
        sp.add_argument("--k", type=int, default=None,
                        help="maximum number of sample subsets")
        sp.add_argument("--kstar", type=int, default=None,
                        help="stagnation window")
        sp.add_argument("--stop", choices=("stagnation", "double-box"),
                        default=None)
        sp.add_argument("--eps-db", type=float, default=None,
                        help="double-box variance tolerance")
        sp.add_argument("--out", type=str, default=None, help="output directory")
        sp.add_argument("--verify", choices=("none", "fast", "full"),
                        default=None)
        sp.add_argument("--plot", action="store_true", default=None)
        sp.add_argument("--threads", type=int, default=None,
                        help="worker-pool cap for verification")
        sp.add_argument("--config", type=str, default=None,
                        help="flat key=value config file; flags override")

    find = sub.add_parser("find", help="single search run")
    add_common(find)
    find.add_argument("--sigma-y", type=float, default=None)

    sweep = sub.add_parser("sweep", help="sweep sigma_y over a grid")
    add_common(sweep)
    sweep.add_argument("--sigma-y-from", type=float, default=None)
    sweep.add_argument("--sigma-y-to", type=float, default=None)
    sweep.add_argument("--sigma-y-step", type=float, default=None)
    return parser


_DEFAULTS = {
    "n": None,
    "mass": 1.0,
    "sigma_x": 1.0,
    "sigma_y": 1.0,
    "sampler": "faure",
    "seed": 0,
    "ns0": 1000,
    "k": 1000,
    "kstar": 100,
    "stop": "stagnation",
    "eps_db": 1e-4,
    "out": "ccbc-out",
    "verify": "full",
    "plot": False,
    "threads": 1,
    "sigma_y_from": None,
    "sigma_y_to": None,
    "sigma_y_step": None,
}

_CASTS = {
    "n": int, "seed": int, "ns0": int, "k": int, "kstar": int, "threads": int,
    "mass": float, "sigma_x": float, "sigma_y": float, "eps_db": float,
    "sigma_y_from": float, "sigma_y_to": float, "sigma_y_step": float,
    "plot": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"--config: cannot read {path!r}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"--config: {path}:{lineno}: expected key=value, got {raw!r}"
            )
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key not in _DEFAULTS:
            raise ConfigurationError(f"--config: {path}:{lineno}: unknown key {key!r}")
        cast = _CASTS.get(key, str)
        try:
            values[key] = cast(val)
        except ValueError:
            raise ConfigurationError(
                f"--config: {path}:{lineno}: bad value {val!r} for {key}"
            )
    return values


def _merge_settings(args: argparse.Namespace) -> dict:
    settings = dict(_DEFAULTS)
    if getattr(args, "config", None):
        settings.update(_read_config_file(args.config))
    for key in settings:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            settings[key] = flag_val
    return settings


def _validate(settings: dict, command: str) -> None:
    if settings["n"] is None:
        raise ConfigurationError("--n is required")
    if settings["n"] < 2:
        raise ConfigurationError(f"--n: need at least 2 bodies, got {settings['n']}")
    if settings["mass"] <= 0:
        raise ConfigurationError(f"--mass must be positive, got {settings['mass']}")
    for key in ("sigma_x", "sigma_y"):
        if settings[key] <= 0:
            raise ConfigurationError(
                f"--{key.replace('_', '-')} must be positive, got {settings[key]}"
            )
    for key in ("ns0", "k", "kstar"):
        if settings[key] < 1:
            raise ConfigurationError(
                f"--{key} must be a positive integer, got {settings[key]}"
            )
    if settings["kstar"] > settings["k"]:
        raise ConfigurationError("--kstar cannot exceed --k")
    if settings["eps_db"] <= 0:
        raise ConfigurationError("--eps-db must be positive")
    if settings["threads"] < 1:
        raise ConfigurationError("--threads must be at least 1")
    if command == "sweep":
        for key in ("sigma_y_from", "sigma_y_to", "sigma_y_step"):
            if settings[key] is None:
                raise ConfigurationError(
                    f"--{key.replace('_', '-')} is required for sweep"
                )
        if settings["sigma_y_step"] <= 0:
            raise ConfigurationError("--sigma-y-step must be positive")
        if settings["sigma_y_to"] < settings["sigma_y_from"]:
            raise ConfigurationError("--sigma-y-to must be >= --sigma-y-from")


def _run_config(settings: dict) -> RunConfig:
    return RunConfig(
        ns0=settings["ns0"],
        k_max=settings["k"],
        k_star=settings["kstar"],
        eps_db=settings["eps_db"],
        stop_rule=settings["stop"].replace("-", "_"),
        sampler=SamplerKind(settings["sampler"], settings["seed"]),
        search=SearchOptions(),
    )


def write_solution_report(path: Path, p: Problem, sol, degenerate,
                          morse_residual=None) -> None:
    """Plain-text key=value report, floats in shortest round-trip form."""
    lines = [f"objective = {_fmt(sol.objective)}"]
    pts = nbody.as_points(p, sol.point)
    for i, (x, y) in enumerate(pts, 1):
        lines.append(f"body_{i} = {_fmt(x)} {_fmt(y)}")
    rep = sol.report
    if rep is not None:
        lines.append(f"inertia_residual = {_fmt(rep.inertia_residual)}")
        com = nbody.center_of_mass(p, sol.point)
        lines.append(f"center_of_mass = {_fmt(com[0])} {_fmt(com[1])}")
        if rep.rms_quadratic is not None:
            lines.append(f"rms_quadratic = {_fmt(rep.rms_quadratic)}")
            lines.append(f"max_quadratic_err = {_fmt(rep.max_quadratic_err)}")
        if rep.krawczyk is not None:
            lines.append(f"zero_in_f = {str(rep.krawczyk.zero_in_f).lower()}")
            lines.append(f"unique = {str(rep.krawczyk.unique).lower()}")
        if p.central:
            lines.append(f"ac_residual = {_fmt(rep.ac_residual)}")
            lines.append(f"morse_index = {rep.morse_index}")
            lines.append(f"isotropy_index = {rep.isotropy_index}")
            if morse_residual is not None:
                lines.append(f"morse_equation_residual = {morse_residual}")
    lines.append(f"degenerate_count = {len(degenerate)}")
    for d_idx, dsol in enumerate(degenerate, 1):
        dpts = nbody.as_points(p, dsol.point)
        for i, (x, y) in enumerate(dpts, 1):
            lines.append(f"degenerate_{d_idx}_body_{i} = {_fmt(x)} {_fmt(y)}")
    path.write_text("\n".join(lines) + "\n")


def read_solution_report(path: Path) -> dict:
    """Parse a report back into a key -> value dict (floats, bools, str)."""
    out: dict = {}
    for raw in path.read_text().splitlines():
        if not raw.strip():
            continue
        key, _, val = raw.partition("=")
        key, val = key.strip(), val.strip()
        parts = val.split()
        parsed: object
        if val in ("true", "false"):
            parsed = val == "true"
        else:
            try:
                nums = [float(x) for x in parts]
                parsed = nums[0] if len(nums) == 1 else nums
            except ValueError:
                parsed = val
        out[key] = parsed
    return out


def write_summary(path: Path, rows: list[dict]) -> None:
    """CSV summary, one row per run."""
    lines = [SUMMARY_HEADER]
    for row in rows:
        lines.append(
            f"{row['n']},{row['sigma_x']},{row['sigma_y']},{row['N_sol']},"
            f"{row['Ns0']},{row['K']},{row['k_star']},{row['k0']},"
            f"{row['wall_time_s']:.3f},{row['sampler']},{row['seed']}"
        )
    path.write_text("\n".join(lines) + "\n")


def plot_configuration(path: Path, p: Problem, sol) -> None:
    """Deterministic standalone SVG: bodies as filled circles at the
    normalized coordinates x*sqrt(m*sigma_x), y*sqrt(m*sigma_y)."""
    pts = nbody.as_points(p, sol.point).copy()
    pts[:, 0] *= np.sqrt(p.m * p.sigma_x)
    pts[:, 1] *= np.sqrt(p.m * p.sigma_y)
    size = 400
    margin = 40
    # normalized coordinates live in [-1, 1]^2 by the box bounds
    def to_px(v, flip=False):
        t = (v + 1.0) / 2.0
        if flip:
            t = 1.0 - t
        return margin + t * (size - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{margin}" y1="{size/2:.1f}" x2="{size-margin}" '
        f'y2="{size/2:.1f}" stroke="#cccccc"/>',
        f'<line x1="{size/2:.1f}" y1="{margin}" x2="{size/2:.1f}" '
        f'y2="{size-margin}" stroke="#cccccc"/>',
    ]
    for i, (x, y) in enumerate(pts, 1):
        cx, cy = to_px(x), to_px(y, flip=True)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="6" fill="#1f4e9c"/>')
        parts.append(
            f'<text x="{cx + 8:.2f}" y="{cy - 8:.2f}" font-size="12" '
            f'font-family="sans-serif">{i}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def _execute_run(settings: dict, sigma_y: float, out_dir: Path,
                 label: str) -> dict:
    p = Problem(settings["n"], m=settings["mass"],
                sigma_x=settings["sigma_x"], sigma_y=sigma_y)
    cfg = _run_config(settings)
    result: RunResult = minfinder.run(p, cfg)

    level = settings["verify"]
    entries = result.solutions.sorted_entries()
    if level != "none":
        if settings["threads"] > 1 and len(entries) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=settings["threads"]) as pool:
                list(pool.map(
                    lambda s: verify.verify_solution(p, s, level=level), entries
                ))
        else:
            for sol in entries:
                verify.verify_solution(p, sol, level=level)

    morse_residual = None
    if p.central and level != "none" and entries:
        morse_residual = verify.morse_equality_residual(p, entries)

    run_dir = out_dir / label
    run_dir.mkdir(parents=True, exist_ok=True)
    for idx, sol in enumerate(entries, 1):
        write_solution_report(run_dir / f"solution_{idx:03d}.txt", p, sol,
                              result.degenerate, morse_residual)
        if settings["plot"]:
            plot_configuration(run_dir / f"solution_{idx:03d}.svg", p, sol)

    st = result.stats
    print(f"{label}: {st.n_solutions} solutions "
          f"({st.n_degenerate} degenerate), k_used={st.k_used}, "
          f"k0={st.k0}, {st.wall_time_s:.1f}s, stop={st.stop_reason}")
    return {
        "n": p.n, "sigma_x": p.sigma_x, "sigma_y": p.sigma_y,
        "N_sol": st.n_solutions, "Ns0": cfg.ns0, "K": cfg.k_max,
        "k_star": cfg.k_star, "k0": st.k0, "wall_time_s": st.wall_time_s,
        "sampler": cfg.sampler.tag, "seed": cfg.sampler.seed,
    }


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        settings = _merge_settings(args)
        _validate(settings, args.command)
    except ConfigurationError as exc:
        print(f"ccbc: error: {exc}", file=sys.stderr)
        return 2

    try:
        out_dir = Path(settings["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "find":
            sigma_ys = [settings["sigma_y"]]
        else:
            lo, hi = settings["sigma_y_from"], settings["sigma_y_to"]
            step = settings["sigma_y_step"]
            count = int(round((hi - lo) / step)) + 1
            sigma_ys = [round(lo + i * step, 12) for i in range(count)
                        if lo + i * step <= hi + 1e-12]
        rows = []
        for sy in sigma_ys:
            label = f"n{settings['n']}_sx{settings['sigma_x']:g}_sy{sy:g}"
            rows.append(_execute_run(settings, sy, out_dir, label))
        write_summary(out_dir / "summary.csv", rows)
    except OSError as exc:
        print(f"ccbc: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"ccbc: internal error: {exc}", file=sys.stderr)
        return 1
    return 0


def console_main() -> None:
    raise SystemExit(main())
