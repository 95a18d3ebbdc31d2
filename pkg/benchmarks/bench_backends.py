"""Timing comparison of the compiled and plain-array curve kernels.

Runs the full detection curve for several flag thresholds and quadrature
sizes on both backends, checks they agree, and prints per-call times with
the speedup.  The first compiled call pays the JIT cost, so each backend
is warmed before timing.

Usage:
    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --thresholds 4,8,16,32 --reps 9
    python benchmarks/bench_backends.py --trials 20000   # include Monte Carlo
"""

import argparse
import dataclasses
import time

import numpy as np

import pyrewatch as pw
from pyrewatch.detection import QuadratureSpec
from pyrewatch.dtmc import detection_curve
from pyrewatch.montecarlo import TrialConfig, run_trials


def best_of(fn, reps):
    # min over repeats: timing noise only ever adds
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples)


def bench_curves(params, thresholds, points, reps):
    print(f"detection_curve, {points} quadrature points, best of {reps}")
    print(f"{'M':>4}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    quad = QuadratureSpec(points=points)
    for m in thresholds:
        p = dataclasses.replace(params, flag_threshold=m)

        def run(backend):
            return detection_curve(p, quad=quad, backend=backend)

        a = run("numba")
        b = run("numpy")
        err = float(np.max(np.abs(a.pi_detected - b.pi_detected)))
        if err > 1e-12:
            raise SystemExit(f"backends disagree at M={m}: {err:.3e}")
        t_nb = best_of(lambda: run("numba"), reps)
        t_np = best_of(lambda: run("numpy"), reps)
        print(f"{m:>4}  {t_nb * 1e3:>8.2f}ms  {t_np * 1e3:>8.2f}ms  {t_np / t_nb:>7.1f}x")


def bench_trials(params, trials, reps):
    print(f"\nrun_trials, {trials} trials, best of {reps}")
    cfg = TrialConfig(params, trials=trials, seed=0)
    run_trials(cfg)
    t = best_of(lambda: run_trials(cfg), reps)
    rate = trials / t
    print(f"  {t:.2f}s total, {rate:,.0f} trials/s (compiled kernel only)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--thresholds", default="1,4,8,16",
                    help="comma-separated flag thresholds (default 1,4,8,16)")
    ap.add_argument("--points", type=int, default=800,
                    help="quadrature points per ring (default 800)")
    ap.add_argument("--reps", type=int, default=7,
                    help="timing repeats per cell (default 7)")
    ap.add_argument("--trials", type=int, default=0,
                    help="also time the Monte Carlo driver with this many trials")
    args = ap.parse_args(argv)

    params = pw.scenario_from_dict({})
    thresholds = [int(v) for v in args.thresholds.split(",")]
    bench_curves(params, thresholds, args.points, args.reps)
    if args.trials > 0:
        bench_trials(params, args.trials, args.reps)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
