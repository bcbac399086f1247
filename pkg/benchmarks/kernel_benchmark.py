"""Time the simulation kernels against each other on fixed workloads.

Runs the same seeded workload through every importable kernel, checks
the outputs are bit-identical, and reports iterations/second plus the
speedup of the compiled kernel over the pure-Python one.

Usage: python3 benchmarks/kernel_benchmark.py [--trials N]
"""

import argparse
import sys
import time

import numpy as np

from plateau_rt import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    SimulationConfig,
    available_kernels,
    run,
)

WORKLOADS = (
    ("needle ell=8 p=1/8", ProblemSpec(ProblemKind.NEEDLE, 8, 8), MutationSchedule.static(0.125)),
    ("blo n=12 ell=3 p=1/12", ProblemSpec(ProblemKind.BLO, 12, 3), MutationSchedule.static(1.0 / 12.0)),
    ("blo n=20 ell=4 adaptive", ProblemSpec(ProblemKind.BLO, 20, 4), MutationSchedule.adaptive_optimal()),
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)

    kernels = available_kernels()
    print(f"kernels: {', '.join(kernels)}   trials per workload: {args.trials}")
    if "cython" not in kernels:
        print("note: compiled kernel unavailable, timing pure python only")

    failures = 0
    for label, spec, schedule in WORKLOADS:
        config = SimulationConfig(spec=spec, schedule=schedule, trials=args.trials, master_seed=args.seed)
        rows = {}
        for name, kernel in kernels.items():
            t0 = time.perf_counter()
            report = run(config, kernel=kernel)
            dt = time.perf_counter() - t0
            iters = int(np.sum(report.trial_iterations))
            rows[name] = (report, dt, iters)
            print(f"  {label:26s} {name:7s} {dt:8.3f} s   {iters / dt:12.3e} iters/s   mean {report.mean:.4f}")
        if len(rows) == 2:
            py_rep, py_dt, _ = rows["python"]
            cy_rep, cy_dt, _ = rows["cython"]
            identical = np.array_equal(py_rep.trial_iterations, cy_rep.trial_iterations) and np.array_equal(
                py_rep.trial_capped, cy_rep.trial_capped
            )
            status = "identical" if identical else "MISMATCH"
            if not identical:
                failures += 1
            print(f"  {label:26s} speedup {py_dt / cy_dt:6.1f}x   outputs {status}")
    if failures:
        print(f"FAIL: {failures} workload(s) disagreed between kernels")
        return 1
    print("PASS: all kernels bit-identical")
    return 0


if __name__ == "__main__":
    sys.exit(main())
