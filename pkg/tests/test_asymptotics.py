"""Tests for scaling laws, optimal rates, and the supporting inequalities."""

import math
import random
import warnings
from fractions import Fraction

import numpy as np
import pytest

from plateau_rt import (
    RegimeWarning,
    adaptive_block_runtime,
    binomial_inequality_suite,
    blo_asymptotic_static,
    block_constants,
    block_time,
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
from plateau_rt.asymptotics import _block_objective_log2, _exact_s_fraction


def test_s_sum_formulas_agree():
    for m in range(1, 41):
        a, b = s_sum(m), s_sum_binomial(m)
        assert abs(a - b) / a <= 1e-11
    assert s_sum(0) == 0.0
    assert s_sum_binomial(0) == 0.0
    with pytest.raises(ValueError):
        s_sum(-1)


def test_s_sum_matches_exact_rationals():
    for m in (1, 2, 7, 25):
        exact = _exact_s_fraction(m)
        assert s_sum(m) == pytest.approx(float(exact), rel=1e-13)
    assert _exact_s_fraction(3) == Fraction(1, 1) + Fraction(3, 2) + Fraction(7, 3)


def test_s_sum_saturates_instead_of_raising():
    assert s_sum(1024) == math.inf
    assert s_sum(5000) == math.inf


def test_block_constants_small_cases():
    bc = block_constants(1)
    assert bc.a == 0.0
    assert bc.b == 0.25
    for ell in (1, 2, 5, 17, 60):
        bc = block_constants(ell)
        assert bc.a + bc.b == pytest.approx(0.5 - 2.0 ** (-ell - 1), rel=1e-13)
    with pytest.raises(ValueError):
        block_constants(0)


def test_block_constants_normalized_branch_is_continuous():
    # ell = 1024 switches to the log-domain assembly (s overflows)
    lo = block_constants(1023)
    hi = block_constants(1024)
    assert math.isinf(hi.s_ell)
    assert math.isfinite(lo.s_ell)
    assert hi.b * 1024 == pytest.approx(lo.b * 1023, rel=1e-3)
    assert hi.a == pytest.approx(lo.a, rel=1e-5)
    # b*ell -> 1 and a -> 1/2 as ell grows
    assert abs(block_constants(512).b * 512 - 1.0) < 3e-3
    assert abs(block_constants(512).a - 0.5) < 2e-3


def test_optimal_static_rate_fixed_point():
    res = optimal_static_rate()
    lam, alpha = res.lambda_value, res.alpha
    assert lam == pytest.approx(1.5936242600400412, abs=1e-13)
    assert alpha == pytest.approx(1.5441386523708702, abs=1e-13)
    assert abs(math.exp(lam) * (lam - 2.0) + 2.0) <= 1e-12
    # the stationarity of (e^x-1)/x^2 in its root form x = 2(1-e^-x)
    assert abs(lam - 2.0 * -math.expm1(-lam)) <= 1e-12
    assert res.rate is None
    assert optimal_static_rate(100).rate == pytest.approx(lam / 100, rel=1e-15)
    with pytest.raises(ValueError):
        optimal_static_rate(1)


def test_adaptive_vs_static_headline_ratio():
    alpha = optimal_static_rate().alpha
    ratio = (math.e / 2.0) / alpha
    assert ratio == pytest.approx(0.8801935707928157, abs=1e-13)
    assert round(ratio, 2) == 0.88


def test_optimal_static_runtime_forms():
    n, ell = 500, 5
    alpha = optimal_static_rate().alpha
    bc = block_constants(ell)
    assert optimal_static_runtime(n, ell) == pytest.approx(
        alpha * bc.b * 2.0**ell * n * n / ell, rel=1e-14
    )
    assert optimal_static_runtime(n, ell, large_ell_form=True) == pytest.approx(
        alpha * 2.0**ell * n * n / (ell * ell), rel=1e-14
    )


def test_blo_asymptotic_static_single_bit_blocks():
    # ell=1: b=1/4, a=0, so the value collapses to n^2 (e^c - 1)/(2 c^2)
    n, c = 1000, 1.0
    got = blo_asymptotic_static(n, 1, c)
    assert got == pytest.approx(n * n * math.expm1(c) / (2 * c * c), rel=1e-13)
    assert blo_asymptotic_static(10000, 4, 1.0) == pytest.approx(
        184371103.23058417, rel=1e-12
    )
    with pytest.raises(ValueError):
        blo_asymptotic_static(1000, 1, 0.0)


def test_blo_asymptotic_static_regime_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        blo_asymptotic_static(1000, 5, 1.0)  # ell = n/200: quiet
    with pytest.warns(RegimeWarning):
        blo_asymptotic_static(12, 3, 1.0)  # ell > n/10


def test_exact_minimizer_boundary_at_zero_locked():
    res = optimal_adaptive_rate_exact(0, 3)
    assert res.rate == 0.5
    assert res.boundary
    assert res.inverse_k_rate is None
    with pytest.raises(ValueError):
        optimal_adaptive_rate_exact(-1, 3)


def test_exact_minimizer_beats_dense_grid():
    rng = random.Random(2718)
    for _ in range(6):
        m = rng.randint(0, 30)
        ell = rng.randint(1, 10)
        res = optimal_adaptive_rate_exact(m, ell)
        k = m * ell
        grid = np.geomspace(1e-9, 0.5, 4001)
        grid_best = min(_block_objective_log2(k, ell, float(p)) for p in grid)
        assert res.objective_log2 <= grid_best + 1e-9


def test_exact_minimizer_frozen_value():
    res = optimal_adaptive_rate_exact(10, 8)
    assert res.rate == pytest.approx(0.011991953855971262, abs=1e-8)
    assert res.method == "numeric-minimization"
    assert not res.boundary
    assert res.warning is None


def test_exact_minimizer_full_range_audit_is_quiet():
    res = optimal_adaptive_rate_exact(2, 3, audit_full_range=True)
    assert res.warning is None  # nothing above p=0.5 beats the minimum


def test_closed_rate_matches_exact_within_model_error():
    # k=80: the model rate sits within 10% of the numeric minimum, and
    # the relative gap shrinks as more blocks lock
    gaps = []
    for m in (10, 100):
        exact = optimal_adaptive_rate_exact(m, 8).rate
        closed = optimal_adaptive_rate_closed(m, 8).rate
        gaps.append(abs(closed - exact) / exact)
    assert gaps[0] < 0.10
    assert gaps[1] < gaps[0]
    assert optimal_adaptive_rate_closed(10, 8).rate == pytest.approx(
        0.012147838881870592, rel=1e-12
    )


def test_closed_rate_reference_fields():
    res = optimal_adaptive_rate_closed(4, 6)
    assert res.large_ell_rate == pytest.approx(
        (math.sqrt(1.0 + 2.0 / 4) - 1.0) / 6, rel=1e-14
    )
    assert res.inverse_k_rate == pytest.approx(1.0 / 24, rel=1e-15)
    with pytest.raises(ValueError):
        optimal_adaptive_rate_closed(0, 6)


def test_closed_rate_single_bit_single_block_clamps():
    res = optimal_adaptive_rate_closed(1, 1)
    assert res.rate == 0.5
    assert res.warning is not None


def test_exact_objective_never_above_closed():
    for m, ell in ((1, 1), (1, 4), (2, 3), (5, 8), (100, 4)):
        e = optimal_adaptive_rate_exact(m, ell).objective_log2
        c = optimal_adaptive_rate_closed(m, ell).objective_log2
        assert e <= c + 1e-12


def test_rate_approaches_inverse_k():
    # spec of the scaling: p ~ 1/k once many blocks are locked
    res = optimal_adaptive_rate_exact(25, 4)
    assert abs(res.rate * 100 - 1.0) < 0.05


def test_optimal_adaptive_runtime_formula():
    bc = block_constants(4)
    want = 0.5 * math.e * bc.b * 2.0**4 * 2000 * 2000 / 4
    assert optimal_adaptive_runtime(2000, 4) == pytest.approx(want, rel=1e-14)
    assert optimal_adaptive_runtime(2000, 4) == pytest.approx(
        5832979.756901701, rel=1e-12
    )
    with pytest.raises(ValueError):
        optimal_adaptive_runtime(3, 4)


def test_adaptive_block_runtime_formula():
    bc = block_constants(5)
    assert adaptive_block_runtime(10, 5) == pytest.approx(
        2.0**5 * math.e * (bc.b * 10 + bc.a), rel=1e-14
    )


def test_growth_inversion_roundtrip():
    for m in (4.0, 8.0, 20.0):
        assert invert_growth(growth_value(m)) == pytest.approx(m, abs=1e-9)
    with pytest.raises(ValueError):
        invert_growth(0.0)


def test_taylor_model_sharp_as_p_vanishes():
    k, ell = 12, 4
    errs = []
    for p in (1e-2, 1e-4):
        exact = block_time(k, ell, p).value
        errs.append(abs(taylor_block_time(k, ell, p) / exact - 1.0))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-3


def test_inequality_suite_all_green():
    report = binomial_inequality_suite()
    assert report.passed
    assert len(report.checks) > 1000
    assert report.failures == []
