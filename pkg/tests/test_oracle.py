"""Tests for the linear-solve oracles: chain construction, hitting times, guards."""

import math
import random

import numpy as np
import pytest

from plateau_rt import (
    CapacityError,
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    blo_total_time,
    needle_time_uniform_start,
)
from plateau_rt.oracle import (
    FULL_STATE_CAP,
    LO_CHAIN_CAP,
    LUMPED_CAP,
    _guarded_solve,
    build_lumped_chain,
    full_state_hitting_times,
    lo_chain_time,
    lumped_hitting_times,
)


def test_full_state_single_bit():
    h = full_state_hitting_times(1, 0.25)
    assert h[1] == 0.0
    assert h[0] == pytest.approx(4.0, rel=1e-12)


def test_full_state_two_bits_half_rate():
    # p = 0.5 resamples uniformly, so every non-target state needs
    # geometric(1/4) steps: expected 4
    h = full_state_hitting_times(2, 0.5)
    assert h[3] == 0.0
    assert h[:3] == pytest.approx([4.0, 4.0, 4.0], rel=1e-12)


def test_full_state_target_relabeling():
    # XOR relabeling maps the walk onto itself, so times only depend on
    # the offset from the target
    ell, p, t = 3, 0.3, 5
    h_ones = full_state_hitting_times(ell, p)
    h_t = full_state_hitting_times(ell, p, target=t)
    size = 1 << ell
    allones = size - 1
    for x in range(size):
        assert h_t[x] == pytest.approx(h_ones[x ^ t ^ allones], rel=1e-12)


def test_full_state_validation():
    with pytest.raises(CapacityError):
        full_state_hitting_times(FULL_STATE_CAP + 1, 0.1)
    with pytest.raises(ValueError):
        full_state_hitting_times(3, 0.1, target=8)
    with pytest.raises(ValueError):
        full_state_hitting_times(3, 0.0)


def test_lumped_chain_is_stochastic_and_binomially_stationary():
    rng = random.Random(8)
    for _ in range(6):
        ell = rng.randint(1, 30)
        p = rng.uniform(0.01, 0.95)
        chain = build_lumped_chain(ell, p)
        T = chain.transition
        assert np.max(np.abs(T.sum(axis=1) - 1.0)) <= 1e-12
        pi = np.array([math.comb(ell, d) for d in range(ell + 1)], dtype=float)
        pi /= pi.sum()
        assert np.max(np.abs(pi @ T - pi)) <= 1e-12


def test_lumped_single_bit():
    h = lumped_hitting_times(1, 0.25)
    assert h[0] == 0.0
    assert h[1] == pytest.approx(4.0, rel=1e-12)


def test_lumped_agrees_with_full_state_classwise():
    rng = random.Random(1234)
    for ell in (3, 6):
        for _ in range(3):
            p = rng.uniform(0.05, 0.6)
            full = full_state_hitting_times(ell, p)
            lum = lumped_hitting_times(ell, p)
            states = np.arange(1 << ell, dtype=np.uint32)
            dist = ell - np.bitwise_count(states).astype(np.int64)
            assert full == pytest.approx(lum[dist], rel=1e-10)


def test_lumped_large_ell_matches_formula():
    # deep plateau: hitting times near 2^100, still 1e-8 agreement
    lum = lumped_hitting_times(100, 0.02)
    w = np.array([math.comb(100, d) for d in range(101)], dtype=float)
    weighted = float(w @ lum / w.sum())
    want = needle_time_uniform_start(100, 0.02).value
    assert weighted == pytest.approx(want, rel=1e-8)
    assert weighted == pytest.approx(1.4629569208149027e30, rel=1e-9)


def test_lumped_at_cap_stays_finite():
    h = lumped_hitting_times(LUMPED_CAP, 0.01)
    assert np.all(np.isfinite(h))
    assert h[0] == 0.0
    assert np.all(h[1:] > 0)


def test_lumped_validation():
    with pytest.raises(CapacityError):
        lumped_hitting_times(LUMPED_CAP + 1, 0.1)
    with pytest.raises(CapacityError):
        build_lumped_chain(0, 0.1)


def test_guarded_solve_residual_contract():
    rng = np.random.default_rng(99)
    for _ in range(5):
        n = int(rng.integers(2, 40))
        A = rng.standard_normal((n, n)) + n * np.eye(n)
        b = rng.standard_normal(n)
        h = _guarded_solve(A, b)
        assert np.max(np.abs(b - A @ h)) <= 1e-9  # absolute at O(1) scale


def test_guarded_solve_rejects_singular():
    A = np.ones((3, 3))
    with pytest.raises((RuntimeError, np.linalg.LinAlgError)):
        _guarded_solve(A, np.ones(3))


def test_lo_chain_single_bit_blocks_anchor():
    # closed form (1/(2p^2))((1-p)^(-n+1) - (1-p)) at n=4, p=0.25
    got = lo_chain_time(4, 1, [0.25] * 4)
    want = (1.0 / (2 * 0.25**2)) * ((1 - 0.25) ** (-3) - (1 - 0.25))
    assert got == pytest.approx(want, rel=1e-10)
    assert got == pytest.approx(12.962962962962964, rel=1e-12)


def test_lo_chain_two_bit_instance():
    assert lo_chain_time(2, 1, [0.5, 0.5]) == pytest.approx(3.0, rel=1e-12)


def test_lo_chain_single_block_is_needle():
    # one block spanning everything: flat until the optimum, uniform start
    got = lo_chain_time(2, 2, [0.5])
    want = needle_time_uniform_start(2, 0.5).value
    assert got == pytest.approx(want, rel=1e-12)


def test_lo_chain_matches_level_sum_for_table():
    got = lo_chain_time(6, 2, [0.3, 0.15, 0.08])
    spec = ProblemSpec(ProblemKind.BLO, 6, 2)
    want = blo_total_time(spec, MutationSchedule.table([0.3, 0.15, 0.08])).value
    assert got == pytest.approx(want, rel=1e-10)
    assert got == pytest.approx(38.65488931948421, rel=1e-12)


def test_lo_chain_validation():
    with pytest.raises(CapacityError):
        lo_chain_time(LO_CHAIN_CAP + 1, 1, [0.1] * (LO_CHAIN_CAP + 1))
    with pytest.raises(ValueError):
        lo_chain_time(6, 4, [0.1])  # 4 does not divide 6
    with pytest.raises(ValueError):
        lo_chain_time(6, 2, [0.1, 0.1])  # needs 3 rates
