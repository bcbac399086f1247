"""Expected runtimes of the (1+1) EA on plateau problems.

Exact expectations via character sums over Z_2^ell, leading-order
asymptotics, optimal static and fitness-dependent mutation rates, and
two independent cross-checks: absorbing-chain solvers and a seeded
Monte Carlo simulator with a compiled hot loop.
"""

from .exceptions import CapacityError
from .group_walk import (
    BitString,
    character_eval,
    fourier_mu,
    hitting_time_from_zero,
    mu_mass,
)
from .runtime_formulas import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    RuntimeEstimate,
    block_time,
    block_time_allowing_zero,
    blo_static_closed_form,
    blo_total_time,
    needle_normalized_limit,
    needle_time_excluding_optimum,
    needle_time_uniform_start,
    normalized_needle,
    plateau_heuristic_time,
)
from .asymptotics import (
    BlockConstants,
    OptimalRateResult,
    RegimeWarning,
    adaptive_block_runtime,
    binomial_inequality_suite,
    blo_asymptotic_static,
    block_constants,
    growth_value,
    invert_growth,
    optimal_adaptive_rate_closed,
    optimal_adaptive_rate_exact,
    optimal_adaptive_runtime,
    optimal_static_rate,
    optimal_static_runtime,
    s_sum,
    s_sum_binomial,
    taylor_block_time,
)
from .oracle import (
    LumpedChain,
    build_lumped_chain,
    full_state_hitting_times,
    lo_chain_time,
    lumped_hitting_times,
)
from .simulator import (
    KERNEL_NAME,
    SimulationConfig,
    SimulationReport,
    available_kernels,
    needle_config,
    run,
    run_block,
    write_trials_csv,
)
from ._report import CheckResult, SuiteReport
from .verification import (
    SUITE_NAMES,
    asymptotic_convergence_suite,
    blo_oracle_suite,
    fourier_oracle_suite,
    inequality_suite,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CapacityError",
    "BitString",
    "character_eval",
    "fourier_mu",
    "hitting_time_from_zero",
    "mu_mass",
    "MutationSchedule",
    "ProblemKind",
    "ProblemSpec",
    "RuntimeEstimate",
    "block_time",
    "block_time_allowing_zero",
    "blo_static_closed_form",
    "blo_total_time",
    "needle_normalized_limit",
    "needle_time_excluding_optimum",
    "needle_time_uniform_start",
    "normalized_needle",
    "plateau_heuristic_time",
    "BlockConstants",
    "OptimalRateResult",
    "RegimeWarning",
    "adaptive_block_runtime",
    "binomial_inequality_suite",
    "blo_asymptotic_static",
    "block_constants",
    "growth_value",
    "invert_growth",
    "optimal_adaptive_rate_closed",
    "optimal_adaptive_rate_exact",
    "optimal_adaptive_runtime",
    "optimal_static_rate",
    "optimal_static_runtime",
    "s_sum",
    "s_sum_binomial",
    "taylor_block_time",
    "LumpedChain",
    "build_lumped_chain",
    "full_state_hitting_times",
    "lo_chain_time",
    "lumped_hitting_times",
    "KERNEL_NAME",
    "SimulationConfig",
    "SimulationReport",
    "available_kernels",
    "needle_config",
    "run",
    "run_block",
    "write_trials_csv",
    "CheckResult",
    "SuiteReport",
    "SUITE_NAMES",
    "asymptotic_convergence_suite",
    "blo_oracle_suite",
    "fourier_oracle_suite",
    "inequality_suite",
    "run_suite",
]
