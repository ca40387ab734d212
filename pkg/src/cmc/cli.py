"""Command line entry point ``cmc``.

Exit codes: 0 success, 1 a check failed (verdict false, barrier failure,
non-Cauchy end, solver divergence), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import rotational as rot
from .admissibility import check_r_admissible
from .config import RunConfig, load_config
from .curve import load_curve, save_curve
from .errors import CMCError, DomainError, ParseError
from .flow import curvature_report, offset_curve

FLOAT = "%.17g"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- output helpers ---------------------------------------------------------------
def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT % float(v)


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _emit(path, buf.getvalue())


def jsonable(obj):
    """Plain JSON types; non-finite floats become ``null``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, data) -> None:
    _emit(path, json.dumps(jsonable(data), indent=1, sort_keys=True) + "\n")


def _emit(path, text) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parse_schedule(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}") from exc


# -- subcommands --------------------------------------------------------------------
def cmd_family(args, config):
    p = rot.make_profile(args.h, args.alpha)
    k = p.k_asym
    s = np.linspace(0.0, 1.0, args.points)
    rows = []
    for rho in p.rho0 + (args.rho_max - p.rho0) * s ** 2:
        rho = float(rho)
        if rho == p.rho0 and p.alpha != 2.0 * p.h:
            u = math.copysign(math.inf, 2.0 * p.h - p.alpha)
        else:
            u = rot.u_alpha(p, rho)
        H = rot.height(p, rho)
        rows.append((rho, u, H, H - p.slope * rho - k))
    write_csv(args.out, ["rho", "u", "H", "H_minus_asymptote"], rows)
    return 0


def cmd_monotonicity(args, config):
    h = args.h
    bb = rot.beta_bar(h, config.beta_divisions, config.beta_cap_multiple)
    n = args.alpha_grid
    alphas = (np.arange(n) + 0.5) * bb / n
    delta = 1e-4 * bb / n
    rows = []
    for a in alphas:
        a = float(a)
        fd = (rot.k_asym(h, a + delta) - rot.k_asym(h, a - delta)) / (2.0 * delta)
        rows.append((a, rot.k_asym(h, a), fd))
    write_csv(args.out, ["alpha", "k_asym", "dk_dalpha_fd"], rows)
    ks = [r[1] for r in rows]
    return 0 if all(b < a for a, b in zip(ks, ks[1:])) else 1


def cmd_flow(args, config):
    curve = load_curve(args.curve)
    evolved = offset_curve(curve, args.t)
    if args.out:
        save_curve(evolved, args.out)
    else:
        write_json(None, evolved.to_dict())
    if args.report:
        rep = curvature_report(curve, args.t)
        keys = ["theta", "k_before", "k_after_closed_form", "k_after_discrete"]
        write_csv(args.report, keys, zip(*(rep[k] for k in keys)))
    return 0


def cmd_admissible(args, config):
    curve = load_curve(args.curve)
    report = check_r_admissible(curve, args.h, config, alpha=args.alpha)
    write_json(args.report, report)
    return 0 if report.verdict else 1


def cmd_solve(args, config):
    from .solver.barriers import barrier_suite
    from .solver.dirichlet import AnnulusProblem, solve_dirichlet

    curve = load_curve(args.curve)
    report = check_r_admissible(curve, args.h, config, alpha=args.alpha)
    if not report.verdict:
        print("inner curve is not admissible: " + "; ".join(report.reasons), file=sys.stderr)
        return 1
    problem = AnnulusProblem(args.h, curve, args.rho2, report.alpha, report.beta)
    sol = solve_dirichlet(problem, args.ns, args.ntheta, args.tol, config, override=True)
    grid = sol.grid
    S, T = np.meshgrid(grid.s, grid.theta, indexing="ij")
    cols = (S, T, grid.rho, sol.u, sol.grad)
    write_csv(args.out, ["s", "theta", "rho", "u", "|grad u|"], zip(*(c.ravel() for c in cols)))
    status = 0 if sol.accepted else 1
    if not sol.accepted:
        print(f"gradient {sol.grad_max} exceeds the ceiling {sol.grad_ceiling}", file=sys.stderr)
    if args.barriers:
        suite = barrier_suite(problem, sol, report, config)
        write_json(args.barriers, {
            "barriers": suite,
            "residual_norm": sol.residual_norm,
            "grad_max": sol.grad_max,
            "grad_ceiling": sol.grad_ceiling,
            "provenance": sol.provenance,
        })
        if not suite.passed:
            failed = [c.name for c in suite.checks if not c.passed]
            print("barrier checks failed: " + ", ".join(failed), file=sys.stderr)
            status = 1
    return status


def cmd_end(args, config):
    from .solver.end import solve_end

    curve = load_curve(args.curve)
    rep = solve_end(curve, args.h, args.schedule, args.tol, config, args.ns, args.ntheta, alpha=args.alpha)
    write_json(args.out, rep)
    return 0 if rep.cauchy and rep.cone_condition else 1


# -- parser -------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmc", description="Constant mean curvature graphs in hyperbolic space.")
    parser.add_argument("--version", action="version", version=f"cmc {__version__}")
    parser.add_argument("--config", help="JSON file with RunConfig overrides")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("family", help="tabulate a rotational graph")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rho-max", type=float, default=14.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("monotonicity", help="asymptotic constant k on an alpha grid")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--alpha-grid", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("flow", help="move a curve along its outward normal")
    p.add_argument("--curve", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("admissible", help="r-admissibility verdict for a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--report")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("solve", help="Dirichlet problem on an annulus")
    p.add_argument("--curve", required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--rho2", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--ns", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--barriers")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("end", help="vertical end from a schedule of outer radii")
    p.add_argument("--curve", required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--schedule", type=_parse_schedule, default=(4.0, 6.0, 8.0, 10.0))
    p.add_argument("--alpha", type=float)
    p.add_argument("--ns", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_end)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        return args.func(args, config)
    except (ParseError, DomainError, OSError) as exc:
        print(f"cmc {args.command}: {exc}", file=sys.stderr)
        return 2
    except CMCError as exc:
        print(f"cmc {args.command}: {exc}", file=sys.stderr)
        return 1


dispatch = main


if __name__ == "__main__":
    sys.exit(main())
