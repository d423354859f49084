"""Command-line interface.

Subcommands: ``solve`` (run a bundled problem), ``plot`` (chart a save
file), ``inspect`` (print a save file's header and per-iteration table),
``list-problems``.  Exit codes: 0 when the solve converged, 2 for any
non-converged solver status, 1 for usage or I/O errors.
"""

import argparse
import sys

import numpy as np

from .driver import SolverOptions, Status, optimize
from .exceptions import SqpError
from .finitediff import FDOptions
from .history import SaveConfig, load_history
from .plotting import DEFAULT_VIZ_VARS, VizConfig, render_series
from .problems import get_problem, list_problems
from .scaling import make_scaler

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _csv_floats(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"bad numeric list {text!r}: {exc}") from exc


def _build_parser():
    parser = _Parser(prog="sqpkit", description="SLSQP solver with iteration telemetry")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a bundled problem")
    solve.add_argument("--problem", required=True, help="bundled problem name (see list-problems)")
    solve.add_argument("--acc", type=float, default=1e-6)
    solve.add_argument("--maxiter", type=int, default=100)
    solve.add_argument("--fd-abs", type=float, default=None)
    solve.add_argument("--fd-rel", type=float, default=None)
    solve.add_argument("--x-scaler", default=None, help="scalar or CSV list")
    solve.add_argument("--obj-scaler", type=float, default=None)
    solve.add_argument("--con-scaler", default=None, help="scalar or CSV list")
    solve.add_argument("--save-file", default=None)
    solve.add_argument("--save-itr", choices=("major", "all"), default="major")
    solve.add_argument("--save-vars", default=None, help="CSV list of variables to save")
    solve.add_argument("--summary-file", default=None)
    solve.add_argument("--visualize", nargs="?", const="", default=None, help="CSV list of series (empty for defaults)")
    solve.add_argument("--viz-out", default="slsqp_plots.png")
    solve.add_argument("--warm-start", default=None)
    solve.add_argument("--hot-start", default=None)

    plot = sub.add_parser("plot", help="chart series from a save file")
    plot.add_argument("--file", required=True)
    plot.add_argument("--vars", required=True, help="CSV list of series selectors")
    plot.add_argument("--out", required=True)

    inspect = sub.add_parser("inspect", help="print a save file's header and iteration table")
    inspect.add_argument("--file", required=True)

    sub.add_parser("list-problems", help="list bundled problems")
    return parser


def _cmd_solve(args):
    entry = get_problem(args.problem)
    spec = entry.spec_factory()

    fd = FDOptions(h_abs=args.fd_abs, h_rel=args.fd_rel)
    scaler = None
    if args.x_scaler is not None or args.obj_scaler is not None or args.con_scaler is not None:
        xs = _csv_floats(args.x_scaler) if args.x_scaler is not None else 1.0
        cs = _csv_floats(args.con_scaler) if args.con_scaler is not None else 1.0
        xs = xs[0] if isinstance(xs, list) and len(xs) == 1 else xs
        cs = cs[0] if isinstance(cs, list) and len(cs) == 1 else cs
        scaler = make_scaler(xs, args.obj_scaler if args.obj_scaler is not None else 1.0,
                             cs, spec.n, spec.m)
    save = None
    if args.save_file is not None:
        save_vars = tuple(v.strip() for v in args.save_vars.split(",")) if args.save_vars else SaveConfig.__dataclass_fields__["save_vars"].default
        save = SaveConfig(path=args.save_file, save_itr=args.save_itr, save_vars=save_vars)
    viz = None
    if args.visualize is not None:
        names = tuple(v.strip() for v in args.visualize.split(",") if v.strip()) or DEFAULT_VIZ_VARS
        viz = VizConfig(vars=names, out_path=args.viz_out)

    opts = SolverOptions(
        acc=args.acc, maxiter=args.maxiter, fd=fd, scaler=scaler, save=save,
        summary_path=args.summary_file, visualize=viz,
        warm_start=args.warm_start, hot_start=args.hot_start,
    )
    results = optimize(spec, opts)

    np.set_printoptions(precision=8, suppress=False)
    print(f"problem     : {entry.name}")
    print(f"status      : {results.status.value}")
    print(f"message     : {results.message}")
    print(f"x*          : {results.x_star}")
    print(f"f*          : {results.f_star:.10g}")
    if results.c_star.size:
        print(f"c*          : {results.c_star}")
        print(f"multipliers : {results.lambda_star}")
    print(f"optimality  : {results.optimality:.6e}")
    print(f"feasibility : {results.feasibility:.6e}")
    print(f"majiter     : {results.num_majiter}   nfev: {results.nfev}   ngev: {results.ngev}")
    if entry.known_solution is not None:
        x_known, f_known = entry.known_solution
        print(f"known x*    : {np.asarray(x_known)}  (f*={f_known:.10g}; {entry.note})")
    return 0 if results.status is Status.CONVERGED else 2


def _cmd_plot(args):
    history = load_history(args.file)
    names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    cfg = VizConfig(vars=names, out_path=args.out, refresh="final")
    out = render_series(history, cfg)
    print(f"wrote {out}")
    return 0


def _cmd_inspect(args):
    history = load_history(args.file)
    head = history.header
    opts = head.get("options") or {}
    print(f"file        : {args.file}")
    print(f"version     : {head.get('version')}   n: {head.get('n')}   m: {head.get('m')}   meq: {head.get('meq')}")
    print(f"save_vars   : {', '.join(head.get('save_vars', []))}")
    print(f"options     : acc={opts.get('acc')} maxiter={opts.get('maxiter')} save_itr={opts.get('save_itr')}")
    if history.truncated:
        print("warning     : final line was torn and has been dropped")
    majors = history.major_records
    print(f"records     : {len(majors)} major, {len(history.eval_records)} eval")
    columns = [c for c in ("majiter", "objective", "optimality", "feasibility", "step") if any(c in r.payload for r in majors)]
    if majors and columns:
        print(" ".join(f"{c:>15s}" for c in columns))
        for rec in majors:
            cells = []
            for c in columns:
                value = rec.payload.get(c)
                cells.append(f"{value:>15.8e}" if isinstance(value, float) else f"{value!s:>15s}")
            print(" ".join(cells))
    return 0


def _cmd_list_problems(_args):
    for entry in list_problems():
        print(f"{entry.name:<18s} {entry.description}")
        if entry.known_solution is not None:
            x_known, f_known = entry.known_solution
            print(f"{'':<18s}   known solution: x*={np.asarray(x_known)}, f*={f_known:.10g} ({entry.note})")
        else:
            print(f"{'':<18s}   {entry.note}")
    print(f"{'dblint-<N>':<18s} double-integrator family for any N >= 2")
    return 0


def cli_main(argv=None):
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "plot":
            return _cmd_plot(args)
        if args.command == "inspect":
            return _cmd_inspect(args)
        return _cmd_list_problems(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 1
    except (SqpError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(cli_main())
