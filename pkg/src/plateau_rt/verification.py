"""Cross-module verification suites.

Each suite pits an analytic route against an independent one and
itemizes the agreement per instance:

* ``fourier-oracle``: Needle character-sum formulas vs the full-state
  and distance-lumped chain solvers.
* ``blo-oracle``: block-leading-ones level sums vs the 2^n-state EA
  chain, plus the static closed form vs the level sum.
* ``inequalities``: the binomial inequality toolbox, exact arithmetic
  where the statements are exact.
* ``asymptotic-convergence``: leading-order formulas approach the exact
  values as the problem grows, and optimal-rate trends land where the
  theory says they should.

All suites are deterministic and pure; run them via ``run_suite`` or
the ``verify`` CLI subcommand.
"""

from __future__ import annotations

import math

import numpy as np

from . import oracle
from ._report import CheckResult, SuiteReport
from .asymptotics import (
    binomial_inequality_suite,
    blo_asymptotic_static,
    optimal_adaptive_rate_closed,
    optimal_adaptive_rate_exact,
    optimal_adaptive_runtime,
    optimal_static_rate,
    taylor_block_time,
)
from .group_walk import BitString, hitting_time_from_zero
from .runtime_formulas import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    block_time,
    blo_static_closed_form,
    blo_total_time,
    needle_normalized_limit,
    needle_time_excluding_optimum,
    needle_time_uniform_start,
    normalized_needle,
)

__all__ = [
    "SUITE_NAMES",
    "needle_rate_grid",
    "fourier_oracle_suite",
    "blo_oracle_suite",
    "inequality_suite",
    "asymptotic_convergence_suite",
    "run_suite",
]


def _rel(x: float, ref: float) -> float:
    return abs(x - ref) / abs(ref)


def needle_rate_grid(ell: int) -> list[float]:
    """Rates {0.5/ell, 1/ell, 2/ell, 0.3, 0.5} clipped to valid (0,1).

    At small ell some of the scaled entries leave the open interval
    (1/ell = 1 at ell = 1) and are dropped; duplicates collapse.
    """
    cand = (0.5 / ell, 1.0 / ell, 2.0 / ell, 0.3, 0.5)
    return sorted({p for p in cand if 0.0 < p < 1.0})


def fourier_oracle_suite(ell_max: int = 10) -> SuiteReport:
    """Needle formulas vs chain solvers for every ell up to ell_max.

    Per (ell, p): the uniform-start and excluding-optimum expectations
    against the full 2^ell-state solve (1e-9 relative), and the lumped
    distance chain against the full solve class-wise.  One large-ell
    lumped instance cross-checks the regime the full solver cannot
    reach.
    """
    checks: list[CheckResult] = []
    for ell in range(1, ell_max + 1):
        states = np.arange(1 << ell)
        dist = ell - np.bitwise_count(states.astype(np.uint32)).astype(np.int64)
        for p in needle_rate_grid(ell):
            tag = f"ell={ell},p={p:.10g}"
            h = oracle.full_state_hitting_times(ell, p)
            uniform = float(h.mean())
            off_target = float(h.sum() / (len(h) - 1))

            r1 = _rel(needle_time_uniform_start(ell, p).value, uniform)
            checks.append(
                CheckResult("uniform-start-vs-chain", tag, r1 <= 1e-9, f"rel={r1:.2e}")
            )
            r2 = _rel(needle_time_excluding_optimum(ell, p).value, off_target)
            checks.append(
                CheckResult("excluding-optimum-vs-chain", tag, r2 <= 1e-9, f"rel={r2:.2e}")
            )

            lum = oracle.lumped_hitting_times(ell, p)
            dev = float(np.max(np.abs(h - lum[dist]) / np.maximum(lum[dist], 1.0)))
            checks.append(
                CheckResult("lumped-classes-vs-chain", tag, dev <= 1e-9, f"rel={dev:.2e}")
            )

            if p == 0.3:
                # ties the character-sum route for a single start state in
                w = _rel(hitting_time_from_zero(BitString.ones(ell), p), h[0])
                checks.append(
                    CheckResult("character-sum-vs-chain", tag, w <= 1e-9, f"rel={w:.2e}")
                )

    ell_big, p_big = 100, 0.02
    lum = oracle.lumped_hitting_times(ell_big, p_big)
    weights = np.array([math.comb(ell_big, d) for d in range(ell_big + 1)], dtype=float)
    weighted = float(np.dot(weights, lum) / 2.0**ell_big)
    r = _rel(needle_time_uniform_start(ell_big, p_big).value, weighted)
    checks.append(
        CheckResult(
            "lumped-weighted-vs-formula",
            f"ell={ell_big},p={p_big}",
            r <= 1e-8,
            f"rel={r:.2e}",
        )
    )
    return SuiteReport("fourier-oracle", checks)


# (n, ell, schedule) instances for the EA-chain cross-check; chain cost
# grows as 8^n so n stays small here
_BLO_INSTANCES: tuple[tuple[int, int, str, MutationSchedule], ...] = (
    (2, 1, "static:0.5", MutationSchedule.static(0.5)),
    (4, 1, "static:0.25", MutationSchedule.static(0.25)),
    (4, 2, "static:0.2", MutationSchedule.static(0.2)),
    (6, 2, "static:0.15", MutationSchedule.static(0.15)),
    (6, 3, "static:1/6", MutationSchedule.static(1.0 / 6.0)),
    (8, 2, "static:0.1", MutationSchedule.static(0.1)),
    (8, 4, "static:0.125", MutationSchedule.static(0.125)),
    (9, 3, "static:0.11", MutationSchedule.static(0.11)),
    (10, 2, "static:0.1", MutationSchedule.static(0.1)),
    (10, 5, "static:0.07", MutationSchedule.static(0.07)),
    (6, 2, "table", MutationSchedule.table((0.3, 0.15, 0.08))),
    (8, 4, "table", MutationSchedule.table((0.2, 0.05))),
    (9, 3, "table", MutationSchedule.table((0.25, 0.12, 0.05))),
    (6, 3, "adaptive", MutationSchedule.adaptive_optimal()),
    (8, 2, "adaptive", MutationSchedule.adaptive_optimal()),
)


def blo_oracle_suite() -> SuiteReport:
    """Level-sum runtime vs the exact 2^n-state EA chain.

    Static, per-level table and adaptive schedules all go through the
    same chain; static instances additionally check the geometric
    closed form against the level sum at 1e-12.
    """
    checks: list[CheckResult] = []
    for n, ell, label, schedule in _BLO_INSTANCES:
        tag = f"n={n},ell={ell},{label}"
        spec = ProblemSpec(ProblemKind.BLO, n, ell)
        rates = schedule.resolve(spec)
        chain = oracle.lo_chain_time(n, ell, rates)
        total = blo_total_time(spec, schedule).value
        r = _rel(total, chain)
        checks.append(CheckResult("chain-vs-level-sum", tag, r <= 1e-8, f"rel={r:.2e}"))
        if schedule.is_static:
            closed = blo_static_closed_form(n, ell, rates[0])
            rc = _rel(closed, total)
            checks.append(
                CheckResult("closed-form-vs-level-sum", tag, rc <= 1e-12, f"rel={rc:.2e}")
            )
    return SuiteReport("blo-oracle", checks)


def inequality_suite() -> SuiteReport:
    return binomial_inequality_suite()


def asymptotic_convergence_suite() -> SuiteReport:
    """Convergence trends of every leading-order formula.

    Normalized Needle value vs its limit, static and adaptive BLO
    runtimes vs their asymptotic forms at growing n, optimal-rate
    scalings p*k -> 1 and p*ell -> sqrt(3)-1, the stationarity of
    lambda, exact-vs-closed minimizer dominance, and the small-p limit
    of the Taylor block model.
    """
    checks: list[CheckResult] = []

    limit = needle_normalized_limit(1.0)
    v = normalized_needle(1000, 1.0)
    checks.append(
        CheckResult(
            "needle-normalized-limit",
            "ell=1000,c=1",
            abs(v - 1.581977) <= 0.05,
            f"value={v:.6f}, limit={limit:.6f}",
        )
    )
    ells = (100, 400, 1600)
    errs = [abs(normalized_needle(L, 1.0) - limit) for L in ells]
    table = ", ".join(f"ell={L}: err={e:.3e}" for L, e in zip(ells, errs))
    checks.append(
        CheckResult(
            "needle-normalized-error-decreasing",
            "c=1,ell in {100,400,1600}",
            errs[0] > errs[1] > errs[2],
            table,
        )
    )

    static_ratio = {}
    for n in (10_000, 100_000):
        spec = ProblemSpec(ProblemKind.BLO, n, 4)
        exact = blo_total_time(spec, MutationSchedule.static(1.0 / n)).value
        static_ratio[n] = exact / blo_asymptotic_static(n, 4, 1.0)
    checks.append(
        CheckResult(
            "static-runtime-ratio",
            "ell=4,c=1,n=1e4",
            0.95 <= static_ratio[10_000] <= 1.05,
            f"ratio={static_ratio[10_000]:.6f}",
        )
    )
    checks.append(
        CheckResult(
            "static-runtime-ratio-improves",
            "ell=4,c=1,n=1e4->1e5",
            abs(static_ratio[100_000] - 1.0) < abs(static_ratio[10_000] - 1.0),
            f"ratio={static_ratio[100_000]:.6f}",
        )
    )

    adaptive_ratio = {}
    for n in (2_000, 20_000):
        spec = ProblemSpec(ProblemKind.BLO, n, 4)
        exact = blo_total_time(spec, MutationSchedule.adaptive_optimal()).value
        adaptive_ratio[n] = exact / optimal_adaptive_runtime(n, 4)
    checks.append(
        CheckResult(
            "adaptive-runtime-ratio",
            "ell=4,n=2e3",
            abs(adaptive_ratio[2_000] - 1.0) <= 0.08,
            f"ratio={adaptive_ratio[2_000]:.6f}",
        )
    )
    checks.append(
        CheckResult(
            "adaptive-runtime-ratio-improves",
            "ell=4,n=2e3->2e4",
            abs(adaptive_ratio[20_000] - 1.0) < abs(adaptive_ratio[2_000] - 1.0),
            f"ratio={adaptive_ratio[20_000]:.6f}",
        )
    )

    devs = []
    for m in (10, 100, 1000):
        k = 8 * m
        p = optimal_adaptive_rate_exact(m, 8).rate
        devs.append(abs(p * k - 1.0))
    table = ", ".join(f"k={8 * m}: |p*k-1|={d:.3e}" for m, d in zip((10, 100, 1000), devs))
    checks.append(
        CheckResult(
            "optimal-rate-times-k-to-one",
            "ell=8,k in {80,800,8000}",
            devs[0] > devs[1] > devs[2],
            table,
        )
    )

    # The Taylor-model rate 2/(1+sqrt(1+4a/(bk)))/k has first-level scaling
    # p*ell -> sqrt(3)-1; the exact minimizer's own limit is ln 2 instead
    # (normalized objective -> e^x/(1-e^{-x/m}), minimized at x=m ln(1+1/m)).
    rho1 = math.sqrt(3.0) - 1.0
    devs = []
    for L in (16, 64, 256):
        p = optimal_adaptive_rate_closed(1, L).rate
        devs.append(abs(p * L - rho1))
    table = ", ".join(f"ell={L}: |p*ell-rho|={d:.3e}" for L, d in zip((16, 64, 256), devs))
    checks.append(
        CheckResult(
            "first-level-rate-times-ell",
            "m=1,ell in {16,64,256}",
            devs[0] > devs[1] > devs[2],
            table,
        )
    )

    ln2 = math.log(2.0)
    devs = []
    for L in (16, 64, 256):
        p = optimal_adaptive_rate_exact(1, L).rate
        devs.append(abs(p * L - ln2))
    table = ", ".join(f"ell={L}: |p*ell-ln2|={d:.3e}" for L, d in zip((16, 64, 256), devs))
    checks.append(
        CheckResult(
            "first-level-exact-rate-to-ln2",
            "m=1,ell in {16,64,256}",
            devs[0] > devs[1] > devs[2] and devs[2] <= 5e-4,
            table,
        )
    )

    lam = optimal_static_rate().lambda_value
    residual = abs(lam - 2.0 * -math.expm1(-lam))
    checks.append(
        CheckResult(
            "lambda-fixed-point",
            "lambda=2(1-exp(-lambda))",
            residual <= 1e-12,
            f"residual={residual:.2e}",
        )
    )

    for m, L in ((1, 1), (1, 4), (2, 3), (5, 8), (10, 8), (100, 4)):
        exact_obj = optimal_adaptive_rate_exact(m, L).objective_log2
        closed_obj = optimal_adaptive_rate_closed(m, L).objective_log2
        checks.append(
            CheckResult(
                "exact-minimizer-dominates",
                f"m={m},ell={L}",
                exact_obj <= closed_obj + 1e-12,
                f"gap_log2={closed_obj - exact_obj:.3e}",
            )
        )

    err_coarse = abs(taylor_block_time(12, 4, 1e-2) / block_time(12, 4, 1e-2).value - 1.0)
    err_fine = abs(taylor_block_time(12, 4, 1e-4) / block_time(12, 4, 1e-4).value - 1.0)
    checks.append(
        CheckResult(
            "taylor-model-converges",
            "k=12,ell=4,p:1e-2->1e-4",
            err_fine < err_coarse,
            f"err(1e-2)={err_coarse:.3e}, err(1e-4)={err_fine:.3e}",
        )
    )

    return SuiteReport("asymptotic-convergence", checks)


_SUITES = {
    "fourier-oracle": fourier_oracle_suite,
    "blo-oracle": blo_oracle_suite,
    "inequalities": inequality_suite,
    "asymptotic-convergence": asymptotic_convergence_suite,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name: str) -> SuiteReport:
    try:
        runner = _SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}") from None
    return runner()
