"""Seeded Monte Carlo simulation of the (1+1) EA on plateau problems.

The hot loop lives in a compiled kernel (``_kernel_cy``) with a
pure-Python twin (``_kernel_py``) selected at import time; both produce
bit-identical trials, so results never depend on which one happens to
be installed.  Set PLATEAU_RT_KERNEL=python or =cython to force one.

Trial i draws from a private splitmix64 stream derived from
(master_seed, i), which makes reports reproducible bit for bit and
trials order-independent: PLATEAU_RT_THREADS workers (default: machine
parallelism) fill disjoint trial ranges of the same output arrays, and
the reduction is numpy's pairwise summation over the trial-indexed
array, insensitive to execution order.

Mutation masks are sampled by one of two equivalent paths, chosen per
fitness level: for p*n < 8 a flip count is inverted off a precomputed
binomial cdf table and placed by partial Fisher-Yates, otherwise each
bit draws its own uniform.  The cdf tables are computed once here, in
Python, and shared by both kernels.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .runtime_formulas import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    block_time,
    blo_total_time,
)

__all__ = [
    "KERNEL_NAME",
    "SimulationConfig",
    "SimulationReport",
    "available_kernels",
    "run",
    "run_block",
    "write_trials_csv",
]

_FALLBACK_CAP = 10**9
_CAP_FACTOR = 10**4
_MAX_CAP = 1 << 62
_PERBIT_THRESHOLD = 8.0
_BLOCK_ELL_CAP = 62  # single-word block content in the compiled kernel

_forced = os.environ.get("PLATEAU_RT_KERNEL")
if _forced == "python":
    from . import _kernel_py as _kernel
elif _forced == "cython":
    from . import _kernel_cy as _kernel  # type: ignore[attr-defined]
elif _forced is None:
    try:
        from . import _kernel_cy as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _kernel
else:
    raise ImportError(f"PLATEAU_RT_KERNEL must be 'python' or 'cython', got {_forced!r}")

KERNEL_NAME: str = _kernel.KERNEL_NAME


def available_kernels() -> dict:
    """Importable kernel modules by name (used by tests and benchmarks)."""
    from . import _kernel_py

    kernels = {"python": _kernel_py}
    try:
        from . import _kernel_cy  # type: ignore[attr-defined]

        kernels["cython"] = _kernel_cy
    except ImportError:
        pass
    return kernels


@dataclass(frozen=True)
class SimulationConfig:
    """What to simulate: problem, schedule, trial count, seed, cap.

    ``iteration_cap`` of None means the default rule: 10^4 times the
    analytic expectation when that is finite, else 10^9.
    """

    spec: ProblemSpec
    schedule: MutationSchedule
    trials: int
    master_seed: int
    iteration_cap: int | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError("master_seed must fit in 64 bits")
        if self.iteration_cap is not None and self.iteration_cap < 1:
            raise ValueError(f"iteration_cap must be >= 1, got {self.iteration_cap}")


@dataclass(frozen=True)
class SimulationReport:
    """Summary of one simulation run.

    ``mean``/``stderr`` (sample stddev over sqrt of count) cover the
    trials that finished under the cap; capped trials are counted in
    ``capped_trials`` and excluded from the statistics.
    ``per_level_means`` attributes iterations to the fitness level held
    when the iteration started.  ``trial_iterations`` keeps the raw
    per-trial counts (capped trials included) for CSV emission.
    """

    mean: float
    stderr: float
    trials_completed: int
    capped_trials: int
    per_level_means: tuple[float, ...]
    master_seed: int
    iteration_cap: int
    kernel: str
    trial_iterations: np.ndarray
    trial_capped: np.ndarray


def _thread_count() -> int:
    env = os.environ.get("PLATEAU_RT_THREADS")
    if env is not None:
        count = int(env)
        if count < 1:
            raise ValueError(f"PLATEAU_RT_THREADS must be >= 1, got {env!r}")
        return count
    return os.cpu_count() or 1


def _binom_cdf_row(nbits: int, p: float) -> np.ndarray:
    """Binomial(nbits, p) cdf with a 2.0 sentinel in the last slot.

    The sentinel both terminates the inversion scan and absorbs the
    float shortfall of the top of the cdf; it only ever turns a
    probability-~2^-53 sliver into d = nbits draws.
    """
    q = 1.0 - p
    pmf = math.exp(nbits * math.log1p(-p))
    row = np.empty(nbits + 1)
    acc = 0.0
    ratio = p / q
    for d in range(nbits):
        acc += pmf
        row[d] = acc
        pmf *= ratio * (nbits - d) / (d + 1.0)
    row[nbits] = 2.0
    return row


def _tables(nbits: int, rates: tuple[float, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    levels = len(rates)
    rate_arr = np.asarray(rates, dtype=np.float64)
    perbit = np.zeros(levels, dtype=np.uint8)
    cdfs = np.zeros((levels, nbits + 1), dtype=np.float64)
    for m, p in enumerate(rates):
        if p * nbits >= _PERBIT_THRESHOLD:
            perbit[m] = 1
        else:
            cdfs[m] = _binom_cdf_row(nbits, p)
    return rate_arr, cdfs, perbit


def _auto_cap(analytic_value: float) -> int:
    if math.isfinite(analytic_value):
        return min(int(math.ceil(_CAP_FACTOR * analytic_value)), _MAX_CAP)
    return _FALLBACK_CAP


def _execute(kind, nbits, ell, levels, rates, cdfs, perbit, cap, master_seed, trials, kernel):
    out_iters = np.zeros(trials, dtype=np.int64)
    out_capped = np.zeros(trials, dtype=np.uint8)
    out_levels = np.zeros((trials, levels), dtype=np.int64)

    workers = min(_thread_count(), trials)
    if workers <= 1:
        kernel.run_trials(
            kind, nbits, ell, levels, rates, cdfs, perbit, cap, master_seed,
            0, trials, out_iters, out_capped, out_levels,
        )
    else:
        chunk = (trials + workers - 1) // workers
        bounds = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    kernel.run_trials,
                    kind, nbits, ell, levels, rates, cdfs, perbit, cap, master_seed,
                    lo, hi, out_iters, out_capped, out_levels,
                )
                for lo, hi in bounds
            ]
            for f in futures:
                f.result()
    return out_iters, out_capped, out_levels


def _summarize(out_iters, out_capped, out_levels, master_seed, cap, kernel_name) -> SimulationReport:
    done = out_capped == 0
    completed = int(done.sum())
    capped = int(out_capped.sum())
    if completed > 0:
        finished = out_iters[done].astype(np.float64)
        mean = float(finished.mean())
        stderr = float(finished.std(ddof=1)) / math.sqrt(completed) if completed > 1 else math.nan
        per_level = tuple(float(v) for v in out_levels[done].mean(axis=0))
    else:
        mean = math.nan
        stderr = math.nan
        per_level = tuple(math.nan for _ in range(out_levels.shape[1]))
    return SimulationReport(
        mean=mean,
        stderr=stderr,
        trials_completed=completed,
        capped_trials=capped,
        per_level_means=per_level,
        master_seed=master_seed,
        iteration_cap=cap,
        kernel=kernel_name,
        trial_iterations=out_iters,
        trial_capped=out_capped,
    )


def run(config: SimulationConfig, kernel=None) -> SimulationReport:
    """Simulate the (1+1) EA and summarize the trial statistics.

    Start uniform at random (needle: optimum included), mutate every
    bit independently at the level's rate, accept iff fitness does not
    drop, stop at the global optimum.
    """
    kernel = kernel if kernel is not None else _kernel
    spec = config.spec
    rates = config.schedule.resolve(spec)
    rate_arr, cdfs, perbit = _tables(spec.n, rates)
    if config.iteration_cap is not None:
        cap = config.iteration_cap
    else:
        cap = _auto_cap(blo_total_time(spec, config.schedule).value)
    out = _execute(
        kernel.KIND_BLO, spec.n, spec.ell, spec.levels,
        rate_arr, cdfs, perbit, cap, config.master_seed, config.trials, kernel,
    )
    return _summarize(*out, config.master_seed, cap, kernel.KERNEL_NAME)


def run_block(
    k: int,
    ell: int,
    p: float,
    trials: int,
    master_seed: int,
    iteration_cap: int | None = None,
    kernel=None,
) -> SimulationReport:
    """Simulate one active block of length ell behind k locked bits.

    The block content starts uniform among non-optimal values, so the
    mean estimates the exact block_time(k, ell, p).
    """
    kernel = kernel if kernel is not None else _kernel
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not 1 <= ell <= _BLOCK_ELL_CAP:
        raise ValueError(f"block simulation supports 1 <= ell <= {_BLOCK_ELL_CAP}, got {ell}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= master_seed < (1 << 64):
        raise ValueError("master_seed must fit in 64 bits")
    nbits = k + ell
    rate_arr, cdfs, perbit = _tables(nbits, (float(p),))
    cap = iteration_cap if iteration_cap is not None else _auto_cap(block_time(k, ell, p).value)
    out = _execute(
        kernel.KIND_BLOCK, nbits, ell, 1, rate_arr, cdfs, perbit, cap,
        master_seed, trials, kernel,
    )
    return _summarize(*out, master_seed, cap, kernel.KERNEL_NAME)


def needle_config(ell: int, p: float, trials: int, master_seed: int,
                  iteration_cap: int | None = None) -> SimulationConfig:
    """Convenience: a needle instance is BLO with a single block."""
    return SimulationConfig(
        spec=ProblemSpec(ProblemKind.NEEDLE, n=ell, ell=ell),
        schedule=MutationSchedule.static(p),
        trials=trials,
        master_seed=master_seed,
        iteration_cap=iteration_cap,
    )


def write_trials_csv(report: SimulationReport, path) -> None:
    """Raw per-trial iteration counts: header trial,iterations; LF; UTF-8."""
    with open(path, "wb") as fh:
        fh.write(b"trial,iterations\n")
        for i, v in enumerate(report.trial_iterations):
            fh.write(f"{i},{int(v)}\n".encode("utf-8"))
