"""Command-line front end.

Data (CSV or JSON) goes to stdout or ``--out``; summaries go to stderr as
lines prefixed ``# ``. Exit codes: 0 success, 1 bad arguments, 2 instance
I/O or parse failure, 3 solver convergence failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import experiments, validation
from .errors import ConvergenceError, ParseError
from .inner import z_max
from .model import (
    DEFAULT_GAMMA0_DB,
    DEFAULT_GAMMA_DB,
    dumps_instance,
    from_db,
    load_instance,
    paper_instance,
    random_instance,
)
from .outer import optimize, zstar_upper_bound

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONVERGENCE = 3
EXIT_VALIDATION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, solver: bool = True) -> None:
    p.add_argument("--instance", metavar="PATH", help="instance file (default: built-in worked example)")
    p.add_argument("--seed", type=int, default=42, help="master seed (default: 42)")
    p.add_argument("--out", metavar="PATH", help="write data here instead of stdout")
    p.add_argument("--clamp", action="store_true", help="report max(0, R) instead of signed rates")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps (default: 1)")
    if solver:
        p.add_argument("--z-tol", type=float, default=1e-6, help="outer search tolerance (default: 1e-6)")
        p.add_argument("--eq-tol", type=float, default=None, help="inner equality tolerance (default: 1e-8*(1+z))")
        p.add_argument("--gap-tol", type=float, default=None, help="inner duality-gap tolerance (default: 1e-6*(1+F))")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coopjam", description="Secrecy rates for cooperative jamming with two-antenna helpers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("paper-example", help="nulling and optimal rates for the instance")
    _common(p)

    p = sub.add_parser("optimize", help="optimal structured noise for the instance (JSON output)")
    _common(p)

    p = sub.add_parser("sweep-z", help="R2(z) on a uniform z grid (CSV)")
    _common(p)
    p.add_argument("--points", type=int, default=51, help="grid points (default: 51)")
    p.add_argument("--z-lo", type=float, default=0.0, help="left end (default: 0)")
    p.add_argument("--z-hi", type=float, default=None, help="right end (default: z_max)")

    p = sub.add_parser("sweep-snr", help="R1 and R2 over a source-SNR grid in dB (CSV)")
    _common(p)
    p.add_argument("--points", type=int, default=11, help="grid points (default: 11)")
    p.add_argument("--db-lo", type=float, default=5.0, help="lowest source SNR in dB (default: 5)")
    p.add_argument("--db-hi", type=float, default=10.0, help="highest source SNR in dB (default: 10)")

    p = sub.add_parser("random-trials", help="R1 and R2 with freshly drawn relay-to-Eve channels (CSV)")
    _common(p)
    p.add_argument("--trials", type=int, default=30, help="number of trials (default: 30)")

    p = sub.add_parser("validate", help="run the solver property suites")
    _common(p, solver=False)
    p.add_argument("--seeds", type=int, default=20, help="random instances per suite (default: 20)")

    p = sub.add_parser("gen-instance", help="write a random instance file (JSON)")
    _common(p, solver=False)
    p.add_argument("--relays", type=int, default=5, help="number of relays (default: 5)")
    p.add_argument("--variance", type=float, default=1.0, help="channel variance (default: 1)")
    p.add_argument("--gamma0-db", type=float, default=DEFAULT_GAMMA0_DB, help="source SNR in dB (default: 5)")
    p.add_argument("--gamma-db", type=float, default=DEFAULT_GAMMA_DB, help="relay SNR in dB (default: 2)")
    return parser


def _validate_args(args) -> str | None:
    if args.jobs < 1:
        return "--jobs must be at least 1"
    for name in ("points", "trials", "seeds", "relays"):
        if getattr(args, name, 1) < 1:
            return f"--{name} must be positive"
    if getattr(args, "points", 2) < 2:
        return "--points must be at least 2"
    if getattr(args, "variance", 1.0) <= 0:
        return "--variance must be positive"
    if getattr(args, "z_tol", 1.0) <= 0:
        return "--z-tol must be positive"
    return None


def _note(msg: str) -> None:
    print(f"# {msg}", file=sys.stderr)


def _solver_kw(args) -> dict:
    return {"eq_tol": args.eq_tol, "gap_tol": args.gap_tol}


def _opt_kw(args) -> dict:
    return {"z_tol": args.z_tol, "clamp": args.clamp, **_solver_kw(args)}


def _cmd_paper_example(args, inst, out) -> int:
    sol = optimize(inst, **_opt_kw(args))
    lines = [
        f"R1={sol.r1_bits:.6f}",
        f"z_star={sol.z_star:.6f}",
        f"R2={sol.r2_bits:.6f}",
        f"z_max={z_max(inst):.6f}",
        f"z_star_bound={zstar_upper_bound(inst, sol.r1_bits):.6f}",
        f"evaluations={sol.evaluations}",
    ]
    out.write("\n".join(lines) + "\n")
    _note(f"nulling R1={sol.r1_bits:.4f} bits, optimal R2={sol.r2_bits:.4f} bits at z*={sol.z_star:.4f}")
    return 0


def _cmd_optimize(args, inst, out) -> int:
    import json

    sol = optimize(inst, **_opt_kw(args))
    doc = {
        "z_star": sol.z_star,
        "r1_bits": sol.r1_bits,
        "r2_bits": sol.r2_bits,
        "f_value": sol.inner.f_value,
        "mu": sol.inner.mu,
        "duality_gap": sol.inner.gap,
        "evaluations": sol.evaluations,
        "covariances": [{"a": s.a, "d": s.d, "b": [s.b.real, s.b.imag]} for s in sol.covariances],
    }
    out.write(json.dumps(doc, indent=2) + "\n")
    _note(f"R2={sol.r2_bits:.6f} at z*={sol.z_star:.6f} (R1={sol.r1_bits:.6f})")
    return 0


def _cmd_sweep_z(args, inst, out) -> int:
    z_hi = z_max(inst) if args.z_hi is None else args.z_hi
    rows = experiments.sweep_z(inst, args.z_lo, z_hi, args.points, clamp=args.clamp, jobs=args.jobs, **_solver_kw(args))
    experiments.write_rows(out, experiments.SWEEP_COLUMNS, [r.as_tuple() for r in rows])
    best = max(rows, key=lambda r: r.r2_bits)
    _note(f"{len(rows)} points on [{args.z_lo}, {z_hi}]; best R2={best.r2_bits:.6f} at z={best.x:.6f}")
    return 0


def _report_gap(rows) -> None:
    mean, worst = experiments.nulling_gap(rows)
    _note(f"{len(rows)} rows; R2-R1 mean={mean:.6f} max={worst:.6f} bits")


def _cmd_sweep_snr(args, inst, out) -> int:
    rows = experiments.sweep_gamma0(inst, args.db_lo, args.db_hi, args.points, jobs=args.jobs, **_opt_kw(args))
    experiments.write_rows(out, experiments.SWEEP_COLUMNS, [r.as_tuple() for r in rows])
    _report_gap(rows)
    return 0


def _cmd_random_trials(args, inst, out) -> int:
    rows = experiments.random_g_trials(inst, args.trials, args.seed, jobs=args.jobs, **_opt_kw(args))
    experiments.write_rows(out, experiments.SWEEP_COLUMNS, [r.as_tuple() for r in rows])
    _report_gap(rows)
    return 0


def _cmd_validate(args, inst, out) -> int:
    results = validation.run_all(seeds=args.seeds, seed=args.seed)
    for res in results:
        out.write(res.line() + "\n")
    failed = [r.name for r in results if not r.passed]
    _note("all suites passed" if not failed else f"failed: {', '.join(failed)}")
    return EXIT_VALIDATION if failed else 0


def _cmd_gen_instance(args, inst, out) -> int:
    inst = random_instance(
        args.relays,
        args.seed,
        args.variance,
        gamma0=from_db(args.gamma0_db),
        gamma=from_db(args.gamma_db),
    )
    out.write(dumps_instance(inst))
    _note(f"{args.relays} relays, seed {args.seed}")
    return 0


COMMANDS = {
    "paper-example": _cmd_paper_example,
    "optimize": _cmd_optimize,
    "sweep-z": _cmd_sweep_z,
    "sweep-snr": _cmd_sweep_snr,
    "random-trials": _cmd_random_trials,
    "validate": _cmd_validate,
    "gen-instance": _cmd_gen_instance,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    problem = _validate_args(args)
    if problem:
        parser.print_usage(sys.stderr)
        print(f"coopjam: error: {problem}", file=sys.stderr)
        return EXIT_USAGE

    try:
        inst = load_instance(args.instance) if args.instance else paper_instance()
    except (OSError, ParseError) as exc:
        print(f"coopjam: cannot load instance: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        with contextlib.ExitStack() as stack:
            if args.out:
                out = stack.enter_context(open(args.out, "w", newline=""))
            else:
                out = sys.stdout
            return COMMANDS[args.command](args, inst, out)
    except ConvergenceError as exc:
        print(f"coopjam: solver did not converge: {exc} (z={exc.z}, mu bracket={exc.bracket})", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"coopjam: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"coopjam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
