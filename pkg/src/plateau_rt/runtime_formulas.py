"""Exact expected runtimes for the (1+1) EA on plateau problems.

The two problems:

* Needle: a single length-ell plateau, fitness flat except at the
  all-ones optimum.
* Block-leading-ones (BLO): n bits in n/ell consecutive blocks, fitness
  counts the leading all-ones blocks.  ell = 1 is classic LeadingOnes.

Expected runtimes come from the weight-grouped form of the character
sum: from a uniform start,

    E[T] = sum_{j=1..ell} C(ell, j) / (1 - (1-2p)^j),

and the BLO total is a sum of per-level block times.  Every estimate
carries a base-2 log companion so that values past double range stay
usable (the value field is then +inf and ``overflow`` is set).

Terms are assembled from exact integer binomials with log-domain
fallbacks, and every sum is compensated (math.fsum).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .group_walk import check_rate

__all__ = [
    "ProblemKind",
    "ProblemSpec",
    "MutationSchedule",
    "RuntimeEstimate",
    "needle_time_uniform_start",
    "needle_time_excluding_optimum",
    "needle_normalized_limit",
    "normalized_needle",
    "block_time",
    "block_time_allowing_zero",
    "blo_total_time",
    "blo_static_closed_form",
    "plateau_heuristic_time",
]

_LN2 = math.log(2.0)
# Largest ell for which float(comb(ell, j)) cannot overflow.
_DIRECT_COMB_LIMIT = 1000
_MAX_LOG2 = 1023.9


@lru_cache(maxsize=256)
def _binomials(ell: int) -> tuple[int, ...]:
    """Exact C(ell, j) for j = 0..ell, by the ratio recurrence."""
    out = [1]
    c = 1
    for j in range(ell):
        c = c * (ell - j) // (j + 1)
        out.append(c)
    return tuple(out)


@lru_cache(maxsize=256)
def _log_binomials(ell: int) -> tuple[float, ...]:
    # math.log takes arbitrary-size ints, so this is exact-to-1-ulp at any ell
    return tuple(math.log(c) for c in _binomials(ell))


def _one_minus_shrink_pow(p: float, j: int) -> float:
    """1 - (1-2p)^j, accurate for p near 0, 0.5 and 1."""
    if p == 0.5:
        return 1.0
    if p < 0.5:
        return -math.expm1(j * math.log1p(-2.0 * p))
    t = math.exp(j * math.log(2.0 * p - 1.0))
    return 1.0 - t if j % 2 == 0 else 1.0 + t


class ProblemKind(enum.Enum):
    NEEDLE = "needle"
    BLO = "blo"


@dataclass(frozen=True)
class ProblemSpec:
    """Problem instance: n bits in blocks of length ell.

    For NEEDLE the whole string is the single block, so ell == n.
    """

    kind: ProblemKind
    n: int
    ell: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.ell < 1:
            raise ValueError(f"n and ell must be >= 1, got n={self.n}, ell={self.ell}")
        if self.n % self.ell != 0:
            raise ValueError(f"block length {self.ell} must divide n={self.n}")
        if self.kind is ProblemKind.NEEDLE and self.ell != self.n:
            raise ValueError("a needle instance is a single block: ell must equal n")

    @property
    def levels(self) -> int:
        return self.n // self.ell


class _ScheduleKind(enum.Enum):
    STATIC = "static"
    TABLE = "table"
    ADAPTIVE = "adaptive-optimal"


@dataclass(frozen=True)
class MutationSchedule:
    """Mutation rate as a function of the current fitness level.

    Build with the classmethods: ``static(p)`` uses one rate
    throughout, ``table(rates)`` gives one rate per fitness level
    m = 0 .. levels-1, ``adaptive_optimal()`` resolves each level to
    the numerically optimal rate for that level.
    """

    kind: _ScheduleKind
    p: float | None = None
    rates: tuple[float, ...] | None = None

    @classmethod
    def static(cls, p: float) -> "MutationSchedule":
        return cls(_ScheduleKind.STATIC, p=check_rate(p))

    @classmethod
    def table(cls, rates: Sequence[float]) -> "MutationSchedule":
        return cls(_ScheduleKind.TABLE, rates=tuple(check_rate(p) for p in rates))

    @classmethod
    def adaptive_optimal(cls) -> "MutationSchedule":
        return cls(_ScheduleKind.ADAPTIVE)

    @property
    def is_static(self) -> bool:
        return self.kind is _ScheduleKind.STATIC

    def resolve(self, spec: ProblemSpec) -> tuple[float, ...]:
        """Per-level rates for ``spec``, length spec.levels."""
        levels = spec.levels
        if self.kind is _ScheduleKind.STATIC:
            assert self.p is not None
            return (self.p,) * levels
        if self.kind is _ScheduleKind.TABLE:
            assert self.rates is not None
            if len(self.rates) != levels:
                raise ValueError(
                    f"schedule table must list {levels} rates (one per fitness level "
                    f"m=0..{levels - 1}), got {len(self.rates)}"
                )
            return self.rates
        # adaptive: one numeric minimization per level; imported here to
        # keep the module dependency one-way at import time
        from .asymptotics import optimal_adaptive_rate_exact

        return tuple(optimal_adaptive_rate_exact(m, spec.ell).rate for m in range(levels))


@dataclass(frozen=True)
class RuntimeEstimate:
    """A runtime number plus its log2 companion and provenance tag.

    ``method`` is one of "exact-fourier", "asymptotic", "oracle",
    "monte-carlo".  ``stderr`` is present exactly when the method is
    monte-carlo.  If the value exceeds double range, ``value`` is +inf,
    ``overflow`` is True and ``log2_value`` remains finite and correct.
    """

    value: float
    log2_value: float
    method: str
    stderr: float | None = None
    overflow: bool = False


def _estimate_from_terms(log_terms: list[float], values: list[float] | None, method: str) -> RuntimeEstimate:
    """Build an estimate from per-term natural logs (and direct values if safe)."""
    m = max(log_terms)
    log2v = (m + math.log(math.fsum(math.exp(t - m) for t in log_terms))) / _LN2
    if log2v >= _MAX_LOG2:
        return RuntimeEstimate(math.inf, log2v, method, overflow=True)
    if values is not None:
        return RuntimeEstimate(math.fsum(values), log2v, method)
    return RuntimeEstimate(2.0**log2v, log2v, method)


def _needle_sum_parts(ell: int, p: float) -> tuple[list[float], list[float] | None]:
    """Per-weight terms C(ell,j)/(1-(1-2p)^j): logs always, values when safe."""
    logc = _log_binomials(ell)
    log_terms = []
    values: list[float] | None = [] if ell <= _DIRECT_COMB_LIMIT else None
    if values is not None:
        combs = _binomials(ell)
    for j in range(1, ell + 1):
        denom = _one_minus_shrink_pow(p, j)
        log_terms.append(logc[j] - math.log(denom))
        if values is not None:
            values.append(float(combs[j]) / denom)
    return log_terms, values


def needle_time_uniform_start(ell: int, p: float) -> RuntimeEstimate:
    """Exact E[T] for Needle from a uniform random start.

    The start may already be the optimum (contributing zero steps);
    see ``needle_time_excluding_optimum`` for the conditioned variant.
    """
    check_rate(p)
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    log_terms, values = _needle_sum_parts(ell, p)
    return _estimate_from_terms(log_terms, values, "exact-fourier")


def needle_time_excluding_optimum(ell: int, p: float) -> RuntimeEstimate:
    """Exact E[T'] for Needle, start uniform over non-optimal strings.

    Equals E[T] * 2^ell / (2^ell - 1).
    """
    base = needle_time_uniform_start(ell, p)
    factor = 1.0 / -math.expm1(-ell * _LN2)  # 2^ell/(2^ell-1)
    log2v = base.log2_value + math.log2(factor)
    value = base.value * factor if not base.overflow else math.inf
    return RuntimeEstimate(value, log2v, base.method, overflow=base.overflow)


def needle_normalized_limit(c: float) -> float:
    """Limit of 2^-ell E[T] as ell grows with p = c/ell: 1/(1 - e^-c)."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    return 1.0 / -math.expm1(-c)


def normalized_needle(ell: int, c: float) -> float:
    """2^-ell E[T] for Needle at p = c/ell.

    Evaluated directly in the normalized domain, so it stays finite for
    any ell.  Converges to needle_normalized_limit(c) as ell grows.
    """
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if ell <= c:
        raise ValueError(f"need ell > c so that p = c/ell is a valid rate, got ell={ell}, c={c}")
    p = c / ell
    logc = _log_binomials(ell)
    terms = [
        math.exp(logc[j] - ell * _LN2) / _one_minus_shrink_pow(p, j) for j in range(1, ell + 1)
    ]
    return math.fsum(terms)


def _scaled_by_survival(base: RuntimeEstimate, k: int, p: float) -> RuntimeEstimate:
    """base / (1-p)^k with log-domain care."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    shift = -k * math.log1p(-p)
    log2v = base.log2_value + shift / _LN2
    if not base.overflow and log2v < _MAX_LOG2:
        return RuntimeEstimate(base.value * math.exp(shift), log2v, base.method)
    return RuntimeEstimate(math.inf, log2v, base.method, overflow=True)


def block_time(k: int, ell: int, p: float) -> RuntimeEstimate:
    """Exact E[T_k]: time to finish a block of length ell behind k locked bits.

    The k leading bits are already optimal and any flip there is
    rejected, so the block walk only advances when all k survive:
    E[T_k] = E[T'] / (1-p)^k, with E[T'] the needle time from a uniform
    non-optimal block start.
    """
    return _scaled_by_survival(needle_time_excluding_optimum(ell, p), k, p)


def block_time_allowing_zero(k: int, ell: int, p: float) -> RuntimeEstimate:
    """Exact E[T_k']: as block_time, but the block start may be optimal.

    Equals E[T] / (1-p)^k; the ratio to block_time is (2^ell-1)/2^ell.
    """
    return _scaled_by_survival(needle_time_uniform_start(ell, p), k, p)


def blo_total_time(spec: ProblemSpec, schedule: MutationSchedule) -> RuntimeEstimate:
    """Exact expected runtime on block-leading-ones.

    By definition the sum over fitness levels m of
    block_time_allowing_zero(m*ell, ell, p_m): the blocks left of the
    active one hold m*ell locked bits, and the active block is uniform
    at the moment level m is entered, optimum included, which absorbs
    the zero-step case.
    """
    rates = schedule.resolve(spec)
    ell = spec.ell
    cache: dict[float, tuple[list[float], list[float] | None]] = {}
    log_terms: list[float] = []
    values: list[float] | None = []
    for m, p in enumerate(rates):
        if p not in cache:
            cache[p] = _needle_sum_parts(ell, p)
        lt, vals = cache[p]
        shift = -m * ell * math.log1p(-p)
        lvl_m = max(lt)
        lvl_log = lvl_m + math.log(math.fsum(math.exp(t - lvl_m) for t in lt)) + shift
        log_terms.append(lvl_log)
        if values is not None and vals is not None and lvl_log < 700.0:
            values.append(math.fsum(vals) * math.exp(shift))
        else:
            values = None
    return _estimate_from_terms(log_terms, values, "exact-fourier")


def blo_static_closed_form(n: int, ell: int, p: float) -> float:
    """Geometric closed form of the BLO total for a static rate.

    ((1-p)^(-n+ell) - (1-p)^ell) / (1 - (1-p)^ell) times the needle sum.
    Equals the per-level sum of blo_total_time; kept separate so the
    two routes can be checked against each other.
    """
    check_rate(p)
    if n % ell != 0:
        raise ValueError(f"block length {ell} must divide n={n}")
    lq = math.log1p(-p)
    log_terms, values = _needle_sum_parts(ell, p)
    m = max(log_terms)
    log_sum = m + math.log(math.fsum(math.exp(t - m) for t in log_terms))
    log_geom = (-n + ell) * lq + math.log1p(-math.exp(n * lq)) - math.log(-math.expm1(ell * lq))
    if (log_sum + log_geom) / _LN2 >= _MAX_LOG2:
        return math.inf
    geom = (math.exp((-n + ell) * lq) - math.exp(ell * lq)) / -math.expm1(ell * lq)
    if values is None:
        return math.exp(log_sum) * geom
    return math.fsum(values) * geom


def plateau_heuristic_time(k: int, ell: int, p: float) -> float:
    """Back-of-envelope block time: 2^ell / ((1-p)^k (1 - (1-p)^ell)).

    Treats the block as restarted uniformly whenever any of its bits
    mutates.  A large-ell approximation of block_time, not a bound.
    """
    check_rate(p)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    lq = math.log1p(-p)
    log2v = ell - (k * lq + math.log(-math.expm1(ell * lq))) / _LN2
    if log2v < _MAX_LOG2:
        return 2.0**log2v
    return math.inf
