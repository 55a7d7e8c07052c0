"""Command-line interface: ``su2control solve | sync | curves | sweep | verify``.

Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures (including a plan that fails oracle verification).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    BoundaryPoint,
    InvalidInput,
    MagnitudeMismatch,
    OutOfValidity,
    SU2ControlError,
)
from .extremal import DriftControlLaw, FreeControlLaw, drift_disk_traj
from .mintime import min_time_drift, min_time_free, min_time_sweep
from .oracle import DEFAULT_DT, VERIFY_TOL, verify_plan
from .reachable import critical_trajectory, frontline, separatrix
from .su2 import IDENTITY, SU2Element, phase_element, swap_like
from .sync import SyncProblem, synchronize

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
_INPUT_ERRORS = (InvalidInput, OutOfValidity, BoundaryPoint, MagnitudeMismatch)
_UNITARITY_SLACK = 1e-6


def fmt(v: float) -> str:
    return f"{v:.9f}"


class ProblemFileError(InvalidInput):
    def __init__(self, path: str, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")


@dataclass
class ParsedProblem:
    problem: SyncProblem
    options: dict


def _complex_pair(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected RE,IM but got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def parse_problem(text: str, path: str = "<problem>", default_gamma: float | None = None) -> ParsedProblem:
    """Parse the line-oriented problem format (see README for the grammar)."""
    targets, gammas = [], []
    options: dict = {}
    known_options = {"dt", "tol", "scan_step"}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *fields = line.split()
        kv = {}
        for f in fields:
            if "=" not in f:
                raise ProblemFileError(path, lineno, f"expected key=value, got {f!r}")
            k, v = f.split("=", 1)
            if k in kv:
                raise ProblemFileError(path, lineno, f"duplicate key {k!r}")
            kv[k] = v
        try:
            if head == "option":
                for k, v in kv.items():
                    if k not in known_options:
                        raise ProblemFileError(path, lineno, f"unknown option {k!r}")
                    val = float(v)
                    if not val > 0 or not math.isfinite(val):
                        raise ProblemFileError(path, lineno, f"option {k} must be positive")
                    options[k] = val
            elif head == "system":
                extra = set(kv) - {"gamma", "alpha", "beta", "psi"}
                if extra:
                    raise ProblemFileError(path, lineno, f"unknown keys {sorted(extra)}")
                if "gamma" in kv:
                    g = float(kv["gamma"])
                elif default_gamma is not None:
                    g = default_gamma
                else:
                    raise ProblemFileError(path, lineno, "missing gamma")
                if not g > 0 or not math.isfinite(g):
                    raise ProblemFileError(path, lineno, f"gamma must be positive, got {kv.get('gamma', g)}")
                if "psi" in kv:
                    if "alpha" in kv or "beta" in kv:
                        raise ProblemFileError(path, lineno, "give either psi or alpha/beta, not both")
                    X = phase_element(float(kv["psi"]))
                elif "alpha" in kv and "beta" in kv:
                    a, b = _complex_pair(kv["alpha"]), _complex_pair(kv["beta"])
                    n = abs(a) ** 2 + abs(b) ** 2
                    if abs(n - 1.0) > _UNITARITY_SLACK:
                        raise ProblemFileError(path, lineno, f"|alpha|^2+|beta|^2 = {n:.9g}, expected 1")
                    X = SU2Element.normalized(a, b)
                else:
                    raise ProblemFileError(path, lineno, "target needs psi=V or both alpha= and beta=")
                targets.append(X)
                gammas.append(g)
            else:
                raise ProblemFileError(path, lineno, f"unknown directive {head!r}")
        except ValueError as exc:
            if isinstance(exc, ProblemFileError):
                raise
            raise ProblemFileError(path, lineno, str(exc)) from None
    if not targets:
        raise ProblemFileError(path, 0, "no system lines")
    problem = SyncProblem(tuple(targets), tuple(gammas), options.get("scan_step"))
    return ParsedProblem(problem, options)


# ---- plan (de)serialisation -------------------------------------------------


def _law_json(law) -> dict:
    kind = "drift" if isinstance(law, DriftControlLaw) else "free"
    return {"system": kind, "gamma": law.gamma, "omega": law.omega, "phi": law.phi, "t_final": law.t_final}


def _law_from_json(d: dict):
    cls = {"drift": DriftControlLaw, "free": FreeControlLaw}.get(d.get("system"))
    if cls is None:
        raise InvalidInput(f"unknown law system {d.get('system')!r}")
    return cls(float(d["gamma"]), float(d["omega"]), float(d["phi"]), float(d["t_final"]))


def _target_json(X: SU2Element) -> dict:
    return {"alpha": [X.alpha.real, X.alpha.imag], "beta": [X.beta.real, X.beta.imag]}


def _target_from_json(d: dict) -> SU2Element:
    return SU2Element.normalized(complex(*d["alpha"]), complex(*d["beta"]))


@dataclass(frozen=True)
class LoadedPlan:
    laws: tuple
    targets: tuple


def plan_to_json(kind: str, T: float, laws, targets, extras: list[dict], report, dt: float, tol: float) -> dict:
    systems = []
    for law, X, ex in zip(laws, targets, extras):
        systems.append({"law": _law_json(law), "target": _target_json(X), **ex})
    return {
        "kind": kind,
        "T_common": T,
        "dt": dt,
        "tol": tol,
        "systems": systems,
        "verification": {"distances": list(report.distances), "passed": report.passed},
    }


def load_plan(path: str) -> tuple[LoadedPlan, dict]:
    try:
        data = json.loads(Path(path).read_text())
        systems = data["systems"]
        laws = tuple(_law_from_json(s["law"]) for s in systems)
        targets = tuple(_target_from_json(s["target"]) for s in systems)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"{path}: cannot read plan ({exc})") from None
    return LoadedPlan(laws, targets), data


# ---- target specification --------------------------------------------------


def _add_target_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--swap", action="store_true", help="SWAP-like target (disk point at the origin)")
    g.add_argument("--identity", action="store_true")
    g.add_argument("--psi", type=float, help="boundary target diag(e^{i psi}, e^{-i psi})")
    g.add_argument("--su2", type=float, nargs=4, metavar=("ARE", "AIM", "BRE", "BIM"))
    g.add_argument("--point", type=float, nargs=2, metavar=("X", "Y"), help="disk point; off-diagonal phase 0")
    p.add_argument("--phase", type=float, default=0.0, help="off-diagonal phase of the SWAP target")


def _target_of(args) -> SU2Element:
    if args.swap:
        return swap_like(args.phase)
    if args.identity:
        return IDENTITY
    if args.psi is not None:
        return phase_element(args.psi)
    if args.su2 is not None:
        a = complex(args.su2[0], args.su2[1])
        b = complex(args.su2[2], args.su2[3])
        n = abs(a) ** 2 + abs(b) ** 2
        if abs(n - 1.0) > _UNITARITY_SLACK:
            raise InvalidInput(f"|alpha|^2+|beta|^2 = {n:.9g}, expected 1")
        return SU2Element.normalized(a, b)
    x, y = args.point
    r2 = x * x + y * y
    if r2 > 1.0 + 1e-9:
        raise InvalidInput(f"point ({x}, {y}) lies outside the unit disk")
    z = complex(x, y) / max(1.0, math.sqrt(r2))
    return SU2Element.normalized(z, math.sqrt(max(0.0, 1.0 - abs(z) ** 2)))


def _require_gamma(args) -> float:
    if args.gamma is None:
        raise InvalidInput("--gamma is required")
    if not args.gamma > 0 or not math.isfinite(args.gamma):
        raise InvalidInput(f"--gamma must be positive, got {args.gamma}")
    return args.gamma


def _out_dir(args) -> Path:
    d = Path(args.out) if args.out else Path.cwd()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


# ---- commands ---------------------------------------------------------------


def cmd_solve(args) -> int:
    gamma = _require_gamma(args)
    X = _target_of(args)
    dt = args.dt or DEFAULT_DT
    tol = args.tol or VERIFY_TOL
    if args.free:
        res = min_time_free(X, gamma)
        w_free, w_drift = res.omega_star, res.omega_star + 1.0
    else:
        res = min_time_drift(X, gamma)
        w_drift, w_free = res.omega_star, res.omega_free
    report = verify_plan(res, dt=dt, tol=tol)
    doc = plan_to_json(
        "solve", res.t_star, res.laws, res.targets,
        [{"gamma_max": gamma, "gamma_eff": gamma, "residual": res.residual}], report, dt, tol,
    )
    _emit(args, doc, [
        ("t_star", res.t_star),
        ("omega_drift", w_drift),
        ("omega_free", w_free),
        ("phi", res.phi),
        ("residual", res.residual),
        ("oracle_distance", report.max_distance),
    ])
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _emit(args, doc: dict, rows: list[tuple[str, float]], table: list[str] | None = None) -> None:
    if args.out:
        path = _out_dir(args) / "plan.json"
        path.write_text(json.dumps(doc, indent=2))
    if args.json:
        print(json.dumps(doc, indent=2))
        return
    for k, v in rows:
        print(f"{k:<16}{v if isinstance(v, int) else fmt(v)}")
    for line in table or []:
        print(line)
    print("verification    " + ("PASS" if doc["verification"]["passed"] else "FAIL"))


def cmd_sync(args) -> int:
    try:
        text = Path(args.problem).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {args.problem}: {exc}") from None
    parsed = parse_problem(text, args.problem, default_gamma=args.gamma)
    dt = args.dt or parsed.options.get("dt", DEFAULT_DT)
    tol = args.tol or parsed.options.get("tol", VERIFY_TOL)
    plan = synchronize(parsed.problem)
    report = verify_plan(plan, dt=dt, tol=tol)
    extras = [
        {"gamma_max": gm, "gamma_eff": ge, "individual_time": ti, "residual": r}
        for gm, ge, ti, r in zip(plan.gamma_max, plan.gamma_eff, plan.individual_times, plan.residuals)
    ]
    doc = plan_to_json("sync", plan.T_common, plan.laws, plan.targets, extras, report, dt, tol)
    table = ["system  gamma_max     gamma_eff     omega         phi           distance"]
    for j, (law, gm, d) in enumerate(zip(plan.laws, plan.gamma_max, report.distances)):
        table.append(
            f"{j:<8}{fmt(gm):<14}{fmt(law.gamma):<14}{fmt(law.omega):<14}{fmt(law.phi):<14}{d:.3e}"
        )
    _emit(args, doc, [("T_common", plan.T_common), ("iterations", plan.iterations)], table)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_verify(args) -> int:
    plan, data = load_plan(args.plan)
    dt = args.dt or float(data.get("dt", DEFAULT_DT))
    tol = args.tol or float(data.get("tol", VERIFY_TOL))
    report = verify_plan(plan, dt=dt, tol=tol)
    if args.json:
        print(json.dumps({"distances": list(report.distances), "passed": report.passed, "dt": dt, "tol": tol}))
    else:
        for j, d in enumerate(report.distances):
            print(f"system {j}: distance {d:.3e}")
        print("verification    " + ("PASS" if report.passed else "FAIL"))
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([v if isinstance(v, (int, np.integer)) and not isinstance(v, bool) else fmt(v) for v in r])


def _curve_rows(omega, t, x, y):
    om = np.broadcast_to(omega, np.shape(x))
    tt = np.broadcast_to(t, np.shape(x))
    return zip(om, tt, x, y)


def _write_svg(path: Path, curves: list[tuple[str, np.ndarray, np.ndarray]]) -> None:
    size, scale = 800, 380.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{size / 2}" cy="{size / 2}" r="{scale}" fill="none" stroke="#888"/>',
    ]
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
    for i, (name, x, y) in enumerate(curves):
        pts = " ".join(f"{size / 2 + scale * a:.2f},{size / 2 - scale * b:.2f}" for a, b in zip(x, y))
        parts.append(
            f'<polyline fill="none" stroke="{palette[i % len(palette)]}" points="{pts}"><title>{name}</title></polyline>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts))


def _tag(v: float) -> str:
    return f"{v:g}".replace("-", "m")


def default_synthesis_omegas(gamma: float) -> list[float]:
    """Representative optimal frequencies on both sides of the separatrix."""
    w_star = (1.0 + gamma**2) / 2.0
    inner = [0.2, 0.5, 0.7, 0.9, 1.3, 1.45, 1.6, 1.8]
    return [-3.0, -1.0, 0.0] + [c * w_star for c in inner]


def cmd_curves(args) -> int:
    gamma = _require_gamma(args)
    if args.n < 3:
        raise InvalidInput("--n must be at least 3")
    out = _out_dir(args)
    curves: list[tuple[str, np.ndarray, np.ndarray]] = []
    written: list[Path] = []

    def emit(name, omega, t, x, y):
        path = out / f"{name}.csv"
        _write_csv(path, ("omega", "t", "x", "y"), _curve_rows(omega, t, x, y))
        curves.append((name, np.asarray(x), np.asarray(y)))
        written.append(path)

    def emit_critical():
        ct = critical_trajectory(gamma, args.n)
        emit("critical", ct.omega_c, ct.t, ct.x, ct.y)
        print(f"omega_c         {fmt(ct.omega_c)}")
        print(f"T_c             {fmt(ct.T_c)}")

    def emit_separatrix():
        sep = separatrix(gamma)
        b = 1.0 - sep.omega_star
        period = 2.0 * math.pi / math.hypot(gamma, b)
        t = np.linspace(0.0, period, args.n)
        x, y = drift_disk_traj(t, sep.omega_star, gamma)
        emit("separatrix", sep.omega_star, t, x, y)
        print(f"omega_star      {fmt(sep.omega_star)}")
        print(f"center_x        {fmt(sep.center.x)}")
        print(f"center_y        {fmt(sep.center.y)}")
        print(f"radius          {fmt(sep.radius)}")

    if args.kind == "frontline":
        if not args.T:
            raise InvalidInput("frontline curves need --T")
        for T in args.T:
            fl = frontline(T, gamma, args.n)
            emit(f"frontline_T{_tag(T)}", fl.omegas, T, fl.x, fl.y)
            print(f"T={fmt(T)}  Omega={fmt(fl.Omega)}  samples={fl.omegas.size}")
    elif args.kind == "critical":
        emit_critical()
    elif args.kind == "separatrix":
        emit_separatrix()
    else:
        omegas = args.omegas or default_synthesis_omegas(gamma)
        tmax = args.tmax if args.tmax is not None else math.pi / gamma
        if not tmax > 0:
            raise InvalidInput("--tmax must be positive")
        t = np.linspace(0.0, tmax, args.n)
        for w in omegas:
            x, y = drift_disk_traj(t, w, gamma)
            emit(f"synthesis_omega{_tag(w)}", w, t, x, y)
        emit_critical()
        emit_separatrix()
    if args.svg:
        svg = out / f"{args.kind}.svg"
        _write_svg(svg, curves)
        written.append(svg)
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    lo, hi = args.gamma_range
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise InvalidInput(f"gamma range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if args.n < 2:
        raise InvalidInput("--n must be at least 2")
    X = _target_of(args)
    grid = np.linspace(lo, hi, args.n)
    if args.with_gamma:
        extra = [g for g in args.with_gamma if lo <= g <= hi]
        grid = np.unique(np.concatenate([grid, extra]))
    rows = min_time_sweep(X, grid)
    data = [(r.gamma, r.t_star, int(r.jump)) for r in rows]
    if args.out:
        path = _out_dir(args) / "sweep.csv"
        _write_csv(path, ("gamma", "t_star", "jump"), data)
        print(f"wrote {path}", file=sys.stderr)
    w = csv.writer(sys.stdout)
    w.writerow(("gamma", "t_star", "jump"))
    for g, t, j in data:
        w.writerow((fmt(g), fmt(t), j))
    for r in rows:
        if r.jump:
            tag = " (on critical trajectory)" if r.near_critical else ""
            print(f"jump at gamma={fmt(r.gamma)}{tag}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, help="control bound")
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--out", metavar="DIR", help="directory for exported files")
    common.add_argument("--dt", type=float, help=f"oracle step in t-units (default {DEFAULT_DT})")
    common.add_argument("--tol", type=float, help=f"verification tolerance (default {VERIFY_TOL})")

    parser = argparse.ArgumentParser(prog="su2control", description="Time-optimal SU(2) control synthesis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="minimum-time control for one target")
    _add_target_flags(p)
    p.add_argument("--free", action="store_true", help="solve the driftless system instead")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sync", parents=[common], help="synchronise N systems from a problem file")
    p.add_argument("problem")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("curves", parents=[common], help="export reachable-set and trajectory curves")
    p.add_argument("kind", choices=["frontline", "critical", "separatrix", "synthesis"])
    p.add_argument("--T", type=_float_list, help="comma-separated times for frontlines")
    p.add_argument("--omegas", type=_float_list, help="comma-separated drift frequencies for synthesis (default: a spread around the separatrix)")
    p.add_argument("--tmax", type=float, help="trajectory length for synthesis (default pi/gamma)")
    p.add_argument("--n", type=int, default=512, help="samples per curve")
    p.add_argument("--svg", action="store_true", help="also write an 800x800 SVG")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("sweep", parents=[common], help="minimum time over a gamma grid")
    _add_target_flags(p)
    p.add_argument("--gamma-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--n", type=int, default=50, help="number of grid points")
    p.add_argument("--with-gamma", type=_float_list, help="extra grid nodes, e.g. a known jump location")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="re-simulate a plan exported with --json/--out")
    p.add_argument("plan")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("dt", "tol"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SU2ControlError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
