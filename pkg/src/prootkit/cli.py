"""Command-line front end.

Subcommands:

* ``root``       compute a principal p-th root of one input matrix
* ``bench``      run several methods on the same preconditioned matrix and
                 emit per-method reports plus a summary CSV
* ``decompose``  print the factored evaluation form of P_d and its cost
* ``cost``       emit the per-iteration analytic cost table as CSV

Every flag can also be supplied through the environment with the
``PROOTKIT_`` prefix (e.g. ``PROOTKIT_P=59`` for ``--p``); explicit flags
win.  Exit codes: 0 success/convergence, 1 bad flags (with usage), 2
non-convergence (reports still written), 3 I/O failure.
"""

import argparse
import csv
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .costmodel import cost_curve
from .errors import ConvergenceError, MMParseError, SingularMatrixError
from .iterations import MethodTag, StoppingRule, run
from .linalg import OpCounter, as_matrix
from .mmio import write_matrix_market
from .polyplan import build_plan, format_factored
from .precondition import precondition, recover_root
from .report import write_report_csv
from .sources import load_source, parse_source

_ENV_PREFIX = "PROOTKIT_"


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on bad flags."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(1)


def _env(name):
    return os.environ.get(_ENV_PREFIX + name)


def _env_bool(name, fallback):
    raw = _env(name)
    if raw is None:
        return fallback
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise SystemExit(1)


def _add(parser, flag, env, *, type=str, default=None, required=False, **kw):
    """add_argument with a PROOTKIT_<env> environment fallback."""
    raw = _env(env)
    if raw is not None:
        try:
            default = type(raw)
        except ValueError:
            parser.error(
                "invalid value %r in %s%s" % (raw, _ENV_PREFIX, env)
            )
        required = False
    parser.add_argument(flag, type=type, default=default, required=required, **kw)


def build_parser():
    parser = _Parser(
        prog="prootkit",
        description="Principal matrix p-th roots by Newton-type iterations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    root = sub.add_parser("root", parents=[], help="compute one p-th root")
    _add(root, "--input", "INPUT", required=True,
         help="identity:N | diag:v1,v2,... | random-spd:N,COND,SEED | mm:PATH | PATH")
    _add(root, "--p", "P", type=int, required=True, help="root order, >= 2")
    _add(root, "--method", "METHOD", default="variant",
         choices=[m.value for m in MethodTag])
    _add(root, "--tol", "TOL", type=float, default=1e-13,
         help="relative residual stopping threshold")
    _add(root, "--max-iter", "MAX_ITER", type=int, default=100)
    root.add_argument(
        "--precondition",
        action=argparse.BooleanOptionalAction,
        default=_env_bool("PRECONDITION", True),
        help="map the input to the convergence region first (default on)",
    )
    _add(root, "--out", "OUT", help="write the computed root (MatrixMarket)")
    _add(root, "--report", "REPORT", help="write the per-iteration CSV here")
    _add(root, "--recover", "RECOVER",
         help="also write the root of the original (unpreconditioned) matrix")
    root.set_defaults(func=cmd_root, parser=root)

    bench = sub.add_parser("bench", help="compare methods on one matrix")
    _add(bench, "--input", "INPUT", required=True)
    _add(bench, "--p", "P", type=int, required=True)
    _add(bench, "--methods", "METHODS", default="in,variant,iter39",
         help="comma-separated method list")
    _add(bench, "--repeats", "REPEATS", type=int, default=3,
         help="timing repetitions; the fastest run is reported")
    _add(bench, "--report-dir", "REPORT_DIR", default=".")
    _add(bench, "--tol", "TOL", type=float, default=1e-13)
    _add(bench, "--max-iter", "MAX_ITER", type=int, default=100)
    bench.set_defaults(func=cmd_bench, parser=bench)

    dec = sub.add_parser("decompose", help="print the factored form of P_d")
    _add(dec, "--d", "D", type=int, help="polynomial degree")
    _add(dec, "--p", "P", type=int, help="root order; uses d = p - 2")
    dec.set_defaults(func=cmd_decompose, parser=dec)

    cost = sub.add_parser("cost", help="per-iteration cost table as CSV")
    _add(cost, "--p-min", "P_MIN", type=int, default=5)
    _add(cost, "--p-max", "P_MAX", type=int, default=100)
    _add(cost, "--out", "OUT", help="output CSV path (default stdout)")
    cost.set_defaults(func=cmd_cost, parser=cost)
    return parser


def cmd_root(args):
    if args.p < 2:
        args.parser.error("--p must be >= 2")
    if args.recover and not args.precondition:
        args.parser.error("--recover requires preconditioning")
    try:
        source = parse_source(args.input)
    except ValueError as exc:
        args.parser.error(str(exc))
    a = as_matrix(load_source(source))
    method = MethodTag(args.method)
    stop = StoppingRule(tol=args.tol, max_iter=args.max_iter)
    counter = OpCounter()

    problem = None
    target = a
    if args.precondition:
        problem = precondition(a, args.p, counter)
        target = problem.a_tilde

    rep = None
    try:
        x, rep = run(
            target, args.p, method, stop, counter, label=source.label
        )
    except ConvergenceError as exc:
        rep = exc.report
        if args.report:
            write_report_csv(rep, args.report)
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except SingularMatrixError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    if args.out:
        write_matrix_market(args.out, x)
    if args.recover:
        write_matrix_market(args.recover, recover_root(problem, x))
    if args.report:
        write_report_csv(rep, args.report)
    print(
        "%s p=%d n=%d: %d iterations, residual %.3e (%s), "
        "%d products, %d divisions"
        % (
            method.value,
            args.p,
            target.shape[0],
            rep.iterations,
            rep.final_residual,
            rep.stop_reason,
            counter.matmul_count,
            counter.lu_count,
        )
    )
    return 0 if rep.final_residual <= stop.tol else 2


@dataclass
class BenchResult:
    """Fastest-of-repeats outcome for one method."""

    method: MethodTag
    report: object
    counter: OpCounter
    wall_ms: float


def bench(a_tilde, p, methods, repeats=3, stop=StoppingRule(), label="matrix"):
    """Run each method on the same matrix; keep each method's fastest run."""
    results = []
    for method in methods:
        best = None
        for _ in range(max(1, repeats)):
            counter = OpCounter()
            _, rep = run(a_tilde, p, method, stop, counter, label=label)
            wall = rep.total_wall_ms
            if best is None or wall < best.wall_ms:
                best = BenchResult(method, rep, counter, wall)
        results.append(best)
    return results


def summary_rows(results):
    """CSV-ready dict rows, with ratios normalized to the 'in' method."""
    baseline = next(
        (r for r in results if r.method is MethodTag.IN), None
    )
    rows = []
    for r in results:
        row = {
            "method": r.method.value,
            "p": r.report.p,
            "n": r.report.n,
            "iterations": r.report.iterations,
            "wall_ms": "%.3f" % r.wall_ms,
            "time_ratio_vs_in": "",
            "final_residual": "%.17e" % r.report.final_residual,
            "stop_reason": r.report.stop_reason,
            "matmuls": r.counter.matmul_count,
            "lu_divisions": r.counter.lu_count,
            "flops": str(r.counter.flop_estimate),
            "flop_ratio_vs_in": "",
        }
        if baseline is not None and baseline.wall_ms > 0:
            row["time_ratio_vs_in"] = "%.4f" % (r.wall_ms / baseline.wall_ms)
        if baseline is not None and baseline.counter.flop_estimate:
            row["flop_ratio_vs_in"] = str(
                r.counter.flop_estimate / baseline.counter.flop_estimate
            )
        rows.append(row)
    return rows


def write_summary_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def read_summary_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_bench(args):
    if args.p < 2:
        args.parser.error("--p must be >= 2")
    try:
        source = parse_source(args.input)
        methods = [MethodTag(m.strip()) for m in args.methods.split(",") if m.strip()]
    except ValueError as exc:
        args.parser.error(str(exc))
    if not methods:
        args.parser.error("--methods must name at least one method")
    a = as_matrix(load_source(source))
    stop = StoppingRule(tol=args.tol, max_iter=args.max_iter)

    problem = precondition(a, args.p, OpCounter())
    try:
        results = bench(
            problem.a_tilde, args.p, methods, args.repeats, stop,
            label=source.label,
        )
    except (ConvergenceError, SingularMatrixError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    os.makedirs(args.report_dir, exist_ok=True)
    for r in results:
        write_report_csv(
            r.report,
            os.path.join(args.report_dir, "report_%s.csv" % r.method.value),
        )
    rows = summary_rows(results)
    write_summary_csv(rows, os.path.join(args.report_dir, "summary.csv"))
    for row in rows:
        print(
            "%-8s %2s iterations, %8s ms, residual %s"
            % (row["method"], row["iterations"], row["wall_ms"],
               row["final_residual"])
        )
    ok = all(r.report.final_residual <= stop.tol for r in results)
    return 0 if ok else 2


def cmd_decompose(args):
    if args.d is None and args.p is None:
        args.parser.error("need --d or --p")
    if args.d is not None and args.p is not None:
        args.parser.error("--d and --p are mutually exclusive")
    if args.d is not None:
        d = args.d
    else:
        if args.p < 2:
            args.parser.error("--p must be >= 2")
        d = args.p - 2
    if d < 0:
        args.parser.error("degree must be nonnegative")
    plan = build_plan(d)
    print("P_%d(X) = %s" % (d, format_factored(d)))
    print("%d multiplications" % plan.matmul_cost)
    return 0


_COST_FIELDS = (
    "p", "plain", "in", "iter39", "coupled", "variant",
    "variant_closed_form", "agrees",
)


def write_cost_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=list(_COST_FIELDS))
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                key: ("yes" if row[key] else "no")
                if key == "agrees"
                else str(row[key])
                for key in _COST_FIELDS
            }
        )


def read_cost_csv(path):
    with open(path, newline="") as fh:
        rows = []
        for rec in csv.DictReader(fh):
            row = {"p": int(rec["p"]), "agrees": rec["agrees"] == "yes"}
            for key in _COST_FIELDS[1:-1]:
                row[key] = Fraction(rec[key])
            rows.append(row)
        return rows


def cmd_cost(args):
    if not 5 <= args.p_min <= args.p_max:
        args.parser.error("need 5 <= --p-min <= --p-max")
    rows = cost_curve(args.p_min, args.p_max)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_cost_csv(rows, fh)
    else:
        write_cost_csv(rows, sys.stdout)
    return 0


def main(argv=None):
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except (OSError, MMParseError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
