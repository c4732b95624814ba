#!/usr/bin/env python3
"""Compare the compiled kernel extension against the NumPy/SciPy fallback.

Times the two raw kernels (dense product, LU-based right division) at a few
sizes, then runs the full root computation under each backend and checks
that the counted operation totals are identical: backend choice decides who
executes the arithmetic, never how much of it is counted.

Usage:
    python benchmarks/bench_backends.py [--sizes 64,128,192] [--p 59]
"""

import argparse
import time

import numpy as np

from prootkit import (
    MethodTag,
    OpCounter,
    StoppingRule,
    available_backends,
    frob_norm,
    gen_random_spd,
    lu_solve_right,
    precondition,
    run,
    use_backend,
)
from prootkit._backend import get_backend


def best_of(fn, repeats):
    """Fastest wall time of ``repeats`` calls, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def time_kernels(n, repeats, rng):
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    den = rng.standard_normal((n, n)) + n * np.eye(n)
    rows = []
    for name in available_backends():
        prev = use_backend(name)
        try:
            backend = get_backend()
            t_mul = best_of(lambda: backend.gemm(a, b), repeats)
            t_div = best_of(
                lambda: lu_solve_right(a, den, OpCounter()), repeats
            )
        finally:
            use_backend(prev)
        rows.append(
            (
                name,
                t_mul * 1e3,
                2.0 * n**3 / t_mul / 1e9,
                t_div * 1e3,
                (8.0 / 3.0) * n**3 / t_div / 1e9,
            )
        )
    return rows


def full_run(p, n, repeats):
    a = gen_random_spd(n, cond_target=380.0, seed=59)
    a_tilde = precondition(a, p).a_tilde
    stop = StoppingRule(tol=1e-15, h_tol=1e-14, max_iter=80)
    outcomes = {}
    for name in available_backends():
        prev = use_backend(name)
        try:
            counter = OpCounter()
            x, rep = run(a_tilde, p, MethodTag.VARIANT, stop, counter)
            wall = best_of(
                lambda: run(a_tilde, p, MethodTag.VARIANT, stop, OpCounter()),
                repeats,
            )
        finally:
            use_backend(prev)
        outcomes[name] = (x, rep, counter.snapshot(), wall)
    return outcomes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,192")
    ap.add_argument("--p", type=int, default=59)
    ap.add_argument("--n", type=int, default=100, help="full-run size")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print("backends:", ", ".join(available_backends()))
    rng = np.random.default_rng(2026)

    header = "%-6s %-9s %12s %9s %12s %9s" % (
        "n", "backend", "matmul ms", "GFLOP/s", "rdivide ms", "GFLOP/s"
    )
    print()
    print(header)
    print("-" * len(header))
    for n in (int(s) for s in args.sizes.split(",")):
        for name, t_mul, gf_mul, t_div, gf_div in time_kernels(
            n, args.repeats, rng
        ):
            print(
                "%-6d %-9s %12.3f %9.2f %12.3f %9.2f"
                % (n, name, t_mul, gf_mul, t_div, gf_div)
            )

    print()
    print("full run: p-th root, p=%d, n=%d, geometric-polynomial variant"
          % (args.p, args.n))
    outcomes = full_run(args.p, args.n, args.repeats)
    snapshots = []
    for name, (x, rep, counts, wall) in sorted(outcomes.items()):
        snapshots.append(counts)
        print(
            "  %-9s %8.1f ms   %d iterations   residual %.2e   "
            "%d products + %d divisions"
            % (
                name,
                wall * 1e3,
                rep.iterations,
                rep.final_residual,
                counts[0],
                counts[1],
            )
        )

    names = sorted(outcomes)
    x0 = outcomes[names[0]][0]
    drift = max(
        frob_norm(outcomes[nm][0] - x0) / frob_norm(x0) for nm in names
    )
    print("  max cross-backend root drift: %.2e" % drift)
    if any(s != snapshots[0] for s in snapshots):
        print("  ERROR: counted totals differ between backends")
        return 1
    print("  counted totals identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
