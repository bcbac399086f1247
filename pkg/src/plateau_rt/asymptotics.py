"""Asymptotic runtimes, optimal mutation rates and the inequality toolbox.

For a block of length ell behind k locked bits, a first-order Taylor
expansion of the exact block time in the rate p gives the working model

    E[T_k] ~ 2^ell/(2^ell - 1) * 2^ell (1-p)^-k (b/p + a)

with constants a, b depending only on ell through
s(ell) = sum_j C(ell,j)/j:

    a = 1/2 - (1 + s(ell)) / 2^(ell+1),   b = s(ell) / 2^(ell+1).

Everything downstream of the model lives here: the optimal static rate
c = lambda/n with lambda solving e^x (x-2) + 2 = 0, the per-level
optimal adaptive rates (closed Taylor form and honest numeric
minimization of the exact objective), the resulting total runtimes, and
the bag of binomial inequalities the derivations lean on, re-checked in
exact integer arithmetic where possible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.optimize

from ._report import CheckResult, SuiteReport
from .group_walk import check_rate
from .runtime_formulas import needle_time_uniform_start

__all__ = [
    "RegimeWarning",
    "BlockConstants",
    "OptimalRateResult",
    "s_sum",
    "s_sum_binomial",
    "block_constants",
    "taylor_block_time",
    "blo_asymptotic_static",
    "optimal_static_rate",
    "optimal_static_runtime",
    "optimal_adaptive_rate_closed",
    "optimal_adaptive_rate_exact",
    "optimal_adaptive_runtime",
    "adaptive_block_runtime",
    "growth_value",
    "invert_growth",
    "binomial_inequality_suite",
]

_LN2 = math.log(2.0)


class RegimeWarning(UserWarning):
    """An asymptotic formula is being used outside its comfortable regime."""


def s_sum(m: int) -> float:
    """s(m) = sum_{j=1..m} C(m,j)/j, via the equivalent sum_{j} (2^j - 1)/j.

    The alternate form needs only m terms.  Overflows to +inf for
    m beyond ~1020; use block_constants for the normalized quantities.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m >= 1024:
        # 2.0**1024 raises OverflowError rather than rounding to inf
        return math.inf
    return math.fsum((2.0**j - 1.0) / j for j in range(1, m + 1))


def s_sum_binomial(m: int) -> float:
    """s(m) directly from binomials; cross-check partner of s_sum."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    c = 1
    total = []
    for j in range(1, m + 1):
        c = c * (m - j + 1) // j
        total.append(c / j)
    return math.fsum(total)


@dataclass(frozen=True)
class BlockConstants:
    """The (a, b) pair of the Taylor block-time model, plus s(ell).

    a + b = 1/2 - 2^-(ell+1); ell = 1 gives (a, b) = (0, 1/4); for large
    ell, b ~ 1/ell and a -> 1/2.  ``s_ell`` may be +inf for very large
    ell even though a and b stay finite.
    """

    ell: int
    s_ell: float
    a: float
    b: float


def block_constants(ell: int) -> BlockConstants:
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    s = s_sum(ell)
    if math.isfinite(s):
        scale = 2.0 ** (-ell - 1)
        b = s * scale
        a = 0.5 - (1.0 + s) * scale
    else:
        # normalized assembly: b = sum_j exp(log C(ell,j) - (ell+1) ln 2)/j
        from .runtime_formulas import _log_binomials

        logc = _log_binomials(ell)
        b = math.fsum(
            math.exp(logc[j] - (ell + 1) * _LN2) / j for j in range(1, ell + 1)
        )
        a = 0.5 - 2.0 ** (-ell - 1) - b
    return BlockConstants(ell=ell, s_ell=s, a=a, b=b)


def taylor_block_time(k: int, ell: int, p: float) -> float:
    """First-order model of the exact block time E[T_k].

    2^ell/(2^ell-1) * 2^ell (1-p)^-k (b/p + a).  Sharp as p -> 0; the
    relative error grows with p.
    """
    check_rate(p)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    bc = block_constants(ell)
    log2v = (
        ell
        - math.log2(-math.expm1(-ell * _LN2))
        - k * math.log1p(-p) / _LN2
        + math.log2(bc.b / p + bc.a)
    )
    if log2v >= 1023.9:
        return math.inf
    cond = 1.0 / -math.expm1(-ell * _LN2)
    return cond * 2.0**ell * math.exp(-k * math.log1p(-p)) * (bc.b / p + bc.a)


def blo_asymptotic_static(n: int, ell: int, c: float) -> float:
    """Leading-order BLO runtime for the static rate p = c/n:

        (n 2^ell / ell) (b n / c^2 + a / c) (e^c - 1).

    Derived for ell = o(n); a RegimeWarning is issued when ell > n/10.
    """
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if n < 1 or ell < 1 or ell > n:
        raise ValueError(f"need 1 <= ell <= n, got n={n}, ell={ell}")
    if ell > n / 10:
        warnings.warn(
            f"blo_asymptotic_static derived for ell = o(n); ell={ell}, n={n} is outside "
            "the trustworthy regime",
            RegimeWarning,
            stacklevel=2,
        )
    bc = block_constants(ell)
    return (n * 2.0**ell / ell) * (bc.b * n / (c * c) + bc.a / c) * math.expm1(c)


@dataclass(frozen=True)
class OptimalRateResult:
    """An optimal-rate answer plus context.

    ``rate`` is a per-bit mutation rate in (0, 1) when the question
    fixes the problem size, else None (the static question without n
    only determines lambda = n * rate).  ``predicted_runtime`` and
    ``objective_log2`` give the exact per-block objective
    E[T'_k] = (1-p)^-k sum_j C(ell,j)/(1-(1-2p)^j) at ``rate``, so
    closed-form and numeric answers are directly comparable.
    """

    rate: float | None
    predicted_runtime: float | None
    method: str
    objective_log2: float | None = None
    lambda_value: float | None = None
    alpha: float | None = None
    large_ell_rate: float | None = None
    inverse_k_rate: float | None = None
    boundary: bool = False
    warning: str | None = None


@lru_cache(maxsize=1)
def _lambda_alpha() -> tuple[float, float]:
    """Solve e^x (x-2) + 2 = 0 on x > 0 by safeguarded Newton."""
    lo, hi = 1.0, 2.0
    x = 1.5
    for _ in range(100):
        h = math.exp(x) * (x - 2.0) + 2.0
        if h > 0:
            hi = x
        else:
            lo = x
        step = h / (math.exp(x) * (x - 1.0))
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * x:
            x = x_new
            break
        x = x_new
    residual = math.exp(x) * (x - 2.0) + 2.0
    if abs(residual) > 1e-12:
        raise RuntimeError(f"lambda solve stalled, residual {residual:.3e}")
    alpha = math.expm1(x) / (x * x)
    return x, alpha


def optimal_static_rate(n: int | None = None) -> OptimalRateResult:
    """Best static rate c/n for BLO in the small-block regime.

    The normalized runtime is proportional to (e^c - 1)/c^2, minimized
    at c = lambda ~ 1.5936 where e^x (x-2) + 2 = 0; the minimum value
    is alpha = (e^lambda - 1)/lambda^2 ~ 1.5441.  With ``n`` given, the
    concrete rate lambda/n is filled in.
    """
    lam, alpha = _lambda_alpha()
    rate = None
    if n is not None:
        if n < 2:
            raise ValueError(f"n must be >= 2 for a valid rate lambda/n, got {n}")
        rate = check_rate(lam / n)
    return OptimalRateResult(
        rate=rate,
        predicted_runtime=None,
        method="closed-form-asymptotic",
        lambda_value=lam,
        alpha=alpha,
    )


def optimal_static_runtime(n: int, ell: int, large_ell_form: bool = False) -> float:
    """Leading-order BLO runtime at the optimal static rate.

    alpha * b * 2^ell * n^2 / ell; with ``large_ell_form`` the b ~ 1/ell
    replacement alpha * 2^ell * n^2 / ell^2 is used instead (valid when
    ell grows).
    """
    if n < 1 or ell < 1 or ell > n:
        raise ValueError(f"need 1 <= ell <= n, got n={n}, ell={ell}")
    _, alpha = _lambda_alpha()
    if large_ell_form:
        return alpha * 2.0**ell * n * n / (ell * ell)
    bc = block_constants(ell)
    return alpha * bc.b * 2.0**ell * n * n / ell


def _block_objective_log2(k: int, ell: int, p: float) -> float:
    """log2 of the exact per-block objective E[T'_k] at rate p."""
    return needle_time_uniform_start(ell, p).log2_value - k * math.log1p(-p) / _LN2


def _objective_result_fields(k: int, ell: int, p: float) -> tuple[float, float]:
    log2v = _block_objective_log2(k, ell, p)
    value = 2.0**log2v if log2v < 1023.9 else math.inf
    return value, log2v


def optimal_adaptive_rate_closed(m: int, ell: int) -> OptimalRateResult:
    """Taylor-model optimal rate while m blocks (k = m*ell bits) are locked.

    Minimizing e^x (b k / x + a) gives
        p_hat(k) = (b k / 2a)(-1 + sqrt(1 + 4a/(b k))) = 2/(1 + sqrt(1 + 4a/(b k)))
    and rate = p_hat(k)/k.  The second form is used: it is stable for
    large k and correct in the a = 0 limit (ell = 1), where p_hat = 1.
    Requires m >= 1.  For ell = m = 1 the model answer p_hat/k = 1 is
    not a valid rate; it is clamped to 0.5 with a warning, matching the
    boundary of the exact optimum's domain.
    """
    if m < 1:
        raise ValueError(f"closed-form adaptive rate needs m >= 1, got {m}")
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    bc = block_constants(ell)
    k = m * ell
    u = 4.0 * bc.a / (bc.b * k)
    p_hat = 2.0 / (1.0 + math.sqrt(1.0 + u))
    rate = p_hat / k
    warning = None
    if rate >= 1.0:
        rate = 0.5
        warning = "model rate p_hat/k >= 1 clamped to 0.5 (outside small-rate validity)"
    m_big = float(m)
    large_ell_rate = (math.sqrt(1.0 + 2.0 / m_big) - 1.0) / ell
    value, log2v = _objective_result_fields(k, ell, rate)
    return OptimalRateResult(
        rate=rate,
        predicted_runtime=value,
        method="closed-form-asymptotic",
        objective_log2=log2v,
        large_ell_rate=large_ell_rate,
        inverse_k_rate=1.0 / k,
        warning=warning,
    )


_GOLDEN_INV = (math.sqrt(5.0) - 1.0) / 2.0
_P_LO = 1e-9
_P_HI = 0.5


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of a unimodal f on [lo, hi], to width tol."""
    x1 = hi - _GOLDEN_INV * (hi - lo)
    x2 = lo + _GOLDEN_INV * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN_INV * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN_INV * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def optimal_adaptive_rate_exact(m: int, ell: int, audit_full_range: bool = False) -> OptimalRateResult:
    """Numerically optimal rate for level m: minimize the exact objective.

    The objective is the exact block time allowing zero steps,
    (1-p)^-(m ell) * sum_j C(ell,j)/(1-(1-2p)^j), minimized over
    p in [1e-9, 0.5] by golden section (tolerance 1e-10 in p) with a
    coarse-grid unimodality guard.  m = 0 is legal and lands on the
    p = 0.5 boundary, reported with ``boundary=True``.  Rates above 0.5
    are excluded from the search (the objective is empirically
    increasing there); ``audit_full_range`` dense-scans (0.5, 1) and
    flags a warning if anything out there beats the returned minimum.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    k = m * ell
    obj = lambda p: _block_objective_log2(k, ell, p)  # noqa: E731

    p_star = _golden_min(obj, _P_LO, _P_HI, 1e-10)
    f_star = obj(p_star)
    warning = None

    # guard against a missed basin: golden section assumes unimodality
    grid = np.geomspace(_P_LO, _P_HI, 33)
    grid_vals = [obj(float(g)) for g in grid]
    i_best = int(np.argmin(grid_vals))
    if grid_vals[i_best] < f_star - 1e-9:
        warning = "objective not unimodal on the coarse grid; dense rescan used"
        dense = np.geomspace(_P_LO, _P_HI, 2001)
        dense_vals = [obj(float(g)) for g in dense]
        j = int(np.argmin(dense_vals))
        lo = float(dense[max(j - 1, 0)])
        hi = float(dense[min(j + 1, len(dense) - 1)])
        p_star = _golden_min(obj, lo, hi, 1e-10)
        f_star = obj(p_star)

    boundary = False
    if obj(_P_HI) <= f_star:
        p_star, f_star = _P_HI, obj(_P_HI)
        boundary = True
    elif _P_HI - p_star <= 1e-9:
        boundary = True

    if audit_full_range:
        audit = np.linspace(0.5, 1.0, 2001)[1:-1]
        best_above = min(obj(float(q)) for q in audit)
        if best_above < f_star:
            warning = "audit found a better rate above 0.5; returned minimum is not global"

    value = 2.0**f_star if f_star < 1023.9 else math.inf
    return OptimalRateResult(
        rate=p_star,
        predicted_runtime=value,
        method="numeric-minimization",
        objective_log2=f_star,
        inverse_k_rate=1.0 / k if k > 0 else None,
        boundary=boundary,
        warning=warning,
    )


def optimal_adaptive_runtime(n: int, ell: int) -> float:
    """Leading-order BLO runtime under per-level optimal rates:

        (e/2) * b * 2^ell * n^2 / ell.
    """
    if n < 1 or ell < 1 or ell > n:
        raise ValueError(f"need 1 <= ell <= n, got n={n}, ell={ell}")
    bc = block_constants(ell)
    return 0.5 * math.e * bc.b * 2.0**ell * n * n / ell


def adaptive_block_runtime(k: int, ell: int) -> float:
    """Leading-order minimum of the per-block objective: 2^ell e (b k + a)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    bc = block_constants(ell)
    return 2.0**ell * math.e * (bc.b * k + bc.a)


_M_BRANCH = 2.0 / _LN2  # growth_value increases for m above this


def growth_value(m: float) -> float:
    """alpha * 2^m / m^2, the normalized runtime growth profile."""
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    _, alpha = _lambda_alpha()
    return alpha * 2.0**m / (m * m)


def invert_growth(gn: float) -> float:
    """Solve growth_value(m) = gn on the increasing branch m > 2/ln 2."""
    floor_value = growth_value(_M_BRANCH)
    if not gn > floor_value:
        raise ValueError(
            f"gn must exceed the branch minimum {floor_value:.6g} at m = 2/ln2, got {gn}"
        )
    lo = _M_BRANCH
    hi = max(4.0, 2.0 * _M_BRANCH)
    while growth_value(hi) < gn:
        hi *= 2.0
    return float(scipy.optimize.brentq(lambda m: growth_value(m) - gn, lo, hi, xtol=1e-12))


def _exact_s_fraction(m: int) -> Fraction:
    return sum((Fraction(2**j - 1, j) for j in range(1, m + 1)), Fraction(0))


def _log_comb(n: int, k: int) -> float:
    return math.log(math.comb(n, k))


def binomial_inequality_suite(
    ell_max: int = 60,
    exp_m_max: int = 64,
    ratio_m_max: int = 60,
    upper_c: str = "1.1",
    dual_m_max: int = 40,
) -> SuiteReport:
    """Re-check the binomial inequalities behind the asymptotics.

    Everything with an exact statement is checked in exact integer or
    rational arithmetic; the band-mass and Stirling rows are numeric
    sanity checks.  Returns an itemized SuiteReport.
    """
    checks: list[CheckResult] = []

    # partial sums: sum_{j<=k} C(ell,j) <= C(ell,k) (ell-(k-1))/(ell-(2k-1)), k < ell/2
    for ell in range(2, ell_max + 1):
        running = 1  # j = 0 term
        for k in range(1, (ell + 1) // 2):
            if not 2 * k < ell:
                break
            running += math.comb(ell, k)
            bound = Fraction(math.comb(ell, k) * (ell - (k - 1)), ell - (2 * k - 1))
            checks.append(
                CheckResult(
                    "partial-binomial-sum",
                    f"ell={ell},k={k}",
                    running <= bound,
                )
            )

    # 2^(m+2) >= m(m-1)
    for m in range(0, exp_m_max + 1):
        checks.append(
            CheckResult("power-vs-quadratic", f"m={m}", 2 ** (m + 2) >= m * (m - 1))
        )

    # s(m) vs 2^(m+1)/m: dual-formula agreement, then the ratio bounds
    for m in range(1, dual_m_max + 1):
        d = abs(s_sum(m) - s_sum_binomial(m))
        rel = d / s_sum(m)
        checks.append(
            CheckResult("s-dual-formula", f"m={m}", rel <= 1e-11, f"rel={rel:.2e}")
        )

    # the upper bound 1 + c/m only kicks in past a threshold; exhibit it
    c_up = Fraction(upper_c)
    onset = None
    ratio_ok: dict[int, bool] = {}
    for m in range(1, ratio_m_max + 1):
        s = _exact_s_fraction(m)
        f = Fraction(2 ** (m + 1), m)
        ratio_ok[m] = s <= f * (1 + c_up / m)
    for m in range(ratio_m_max, 0, -1):
        if ratio_ok[m]:
            onset = m
        else:
            break
    checks.append(
        CheckResult(
            "s-upper-bound-onset",
            f"c={upper_c}",
            onset is not None,
            f"holds for all m in [{onset}, {ratio_m_max}]",
        )
    )
    for m in range(7, ratio_m_max + 1):
        s = _exact_s_fraction(m)
        f = Fraction(2 ** (m + 1), m)
        lower_plain = s >= f * (1 + Fraction(1, m))
        lower_strong = s >= f * (1 + Fraction(1, m - 1))
        ok = lower_plain and lower_strong
        if onset is not None and m >= onset:
            ok = ok and ratio_ok[m]
        checks.append(
            CheckResult(
                "s-ratio-bounds",
                f"m={m}",
                ok,
                f"s/f={float(s / f):.6f}",
            )
        )

    # central band mass at ell = 2000, alpha = 0.3
    ell = 2000
    alpha_band = 0.3
    lo_j = math.ceil((1 - alpha_band) * ell / 2)
    hi_j = math.floor((1 + alpha_band) * ell / 2)
    mass = math.fsum(
        math.exp(_log_comb(ell, j) - ell * _LN2) for j in range(lo_j, hi_j + 1)
    )
    checks.append(
        CheckResult(
            "central-band-mass",
            f"ell={ell},alpha={alpha_band}",
            mass >= 0.99,
            f"mass={mass:.6f}",
        )
    )

    # Stirling-style binomial approximation: log C(3m, m) error shrinks with m
    def log_comb_approx(am: int, bm: int) -> float:
        a, b = float(am), float(bm)
        g = a - b
        return (
            0.5 * math.log(a / (2.0 * math.pi * b * g))
            + a * math.log(a)
            - b * math.log(b)
            - g * math.log(g)
        )

    for m in (50, 200, 800):
        err = abs(log_comb_approx(3 * m, m) - _log_comb(3 * m, m))
        checks.append(
            CheckResult(
                "binomial-approximation",
                f"C({3 * m},{m})",
                err <= 1.0 / m,
                f"log-err={err:.2e}",
            )
        )

    return SuiteReport("inequalities", checks)
