"""Tests for the Monte Carlo engine: determinism, kernels, statistics."""

import math
import random

import numpy as np
import pytest

from plateau_rt import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    SimulationConfig,
    available_kernels,
    block_time,
    blo_total_time,
    needle_config,
    needle_time_excluding_optimum,
    run,
    run_block,
    write_trials_csv,
)
from plateau_rt import _kernel_py
from plateau_rt.simulator import _binom_cdf_row, _tables


def test_same_seed_same_everything():
    cfg = needle_config(5, 0.2, trials=200, master_seed=31415)
    a = run(cfg)
    b = run(cfg)
    assert a.mean == b.mean
    assert a.stderr == b.stderr
    assert np.array_equal(a.trial_iterations, b.trial_iterations)
    assert np.array_equal(a.trial_capped, b.trial_capped)


def test_frozen_trial_stream():
    rep = run(needle_config(3, 0.25, trials=3, master_seed=123))
    assert rep.trial_iterations.tolist() == [52, 0, 22]
    assert rep.mean == pytest.approx(24.666666666666668, rel=1e-15)


def test_trial_results_are_prefix_stable():
    short = run(needle_config(4, 0.15, trials=10, master_seed=8))
    long = run(needle_config(4, 0.15, trials=20, master_seed=8))
    assert np.array_equal(long.trial_iterations[:10], short.trial_iterations)


def test_kernels_are_bit_identical():
    kernels = available_kernels()
    if "cython" not in kernels:
        pytest.skip("compiled kernel not built")
    spec = ProblemSpec(ProblemKind.BLO, 8, 2)
    cfg = SimulationConfig(
        spec=spec,
        schedule=MutationSchedule.table([0.3, 0.12, 0.06, 0.03]),
        trials=300,
        master_seed=2024,
    )
    rep_py = run(cfg, kernel=kernels["python"])
    rep_cy = run(cfg, kernel=kernels["cython"])
    assert np.array_equal(rep_py.trial_iterations, rep_cy.trial_iterations)
    assert np.array_equal(rep_py.per_level_means, rep_cy.per_level_means)
    assert rep_py.kernel == "python" and rep_cy.kernel == "cython"


def test_thread_partitioning_does_not_change_results(monkeypatch):
    cfg = needle_config(5, 0.2, trials=97, master_seed=77)
    monkeypatch.setenv("PLATEAU_RT_THREADS", "1")
    serial = run(cfg)
    monkeypatch.setenv("PLATEAU_RT_THREADS", "4")
    threaded = run(cfg)
    assert np.array_equal(serial.trial_iterations, threaded.trial_iterations)
    assert serial.mean == threaded.mean


def test_block_walk_agrees_with_exact_formula():
    rep = run_block(6, 3, 0.1, trials=6000, master_seed=11)
    want = block_time(6, 3, 0.1).value
    assert abs(rep.mean - want) <= 3 * rep.stderr
    assert rep.capped_trials == 0


def test_block_walk_geometric_case():
    # p=0.5 on 2 free bits resamples uniformly: geometric(1/4), mean 4
    rep = run_block(0, 2, 0.5, trials=4000, master_seed=17)
    assert abs(rep.mean - 4.0) <= 3 * rep.stderr
    assert needle_time_excluding_optimum(2, 0.5).value == 4.0


def test_blo_mean_matches_exact():
    spec = ProblemSpec(ProblemKind.BLO, 8, 2)
    schedule = MutationSchedule.static(0.1)
    cfg = SimulationConfig(spec=spec, schedule=schedule, trials=8000, master_seed=3)
    rep = run(cfg)
    want = blo_total_time(spec, schedule).value
    assert abs(rep.mean - want) <= 3 * rep.stderr
    assert len(rep.per_level_means) == 4
    assert math.fsum(rep.per_level_means) == pytest.approx(rep.mean, rel=1e-12)


def test_capped_trials_are_excluded_and_counted():
    rep = run(needle_config(4, 0.1, trials=50, master_seed=5, iteration_cap=1))
    assert rep.capped_trials == 42
    assert rep.trials_completed == 8
    assert rep.capped_trials + rep.trials_completed == 50
    assert set(rep.trial_iterations.tolist()) <= {0, 1}
    assert rep.mean == pytest.approx(0.25)  # survivors finish in 0 or 1 steps
    assert np.sum(rep.trial_capped) == 42


def test_fitness_matches_naive_scan():
    rng = random.Random(55)
    n, ell = 12, 3
    levels = n // ell
    full = (1 << n) - 1
    for _ in range(300):
        x = rng.randrange(1 << n)
        lead = 0
        while lead < n and (x >> lead) & 1:
            lead += 1
        want = min(lead // ell, levels)
        assert _kernel_py._fitness(x, full, ell, levels) == want


def test_trajectory_is_elitist():
    # replay full trials and check fitness never decreases
    n, ell = 8, 2
    levels = n // ell
    spec = ProblemSpec(ProblemKind.BLO, n, ell)
    rates = MutationSchedule.static(0.15).resolve(spec)
    rate_arr, cdfs, perbit = _tables(n, rates)
    for trial in range(20):
        path = _kernel_py.trial_fitness_trajectory(
            n, ell, levels, rate_arr, cdfs, perbit, 10**6, 424242, trial
        )
        assert path[-1] == levels
        assert all(b >= a for a, b in zip(path, path[1:]))


def test_sampler_paths_agree_in_distribution():
    # count-table inversion and per-bit sampling draw from the same
    # binomial flip-count law; check both against exact probabilities
    nbits, p, draws = 10, 0.12, 20000
    cdf = _binom_cdf_row(nbits, p)
    pmf = np.diff(np.concatenate([[0.0], cdf[:-1], [1.0]]))[: nbits + 1]
    for perbit in (False, True):
        rng = _kernel_py._Stream(9090)
        idx = list(range(nbits))
        counts = np.zeros(nbits + 1, dtype=np.int64)
        for _ in range(draws):
            mask = _kernel_py._sample_mask(rng, nbits, p, perbit, cdf, idx)
            counts[bin(mask).count("1")] += 1
        freq = counts / draws
        sigma = np.sqrt(np.maximum(pmf * (1 - pmf), 1e-12) / draws)
        assert np.all(np.abs(freq - pmf) <= 5 * sigma + 1e-4)


def test_mutation_path_selection():
    # sparse regime uses the count table, dense regime flips per bit
    _, _, perbit = _tables(100, (0.01,))  # p*n = 1
    assert perbit.tolist() == [0]
    _, _, perbit = _tables(100, (0.2,))  # p*n = 20
    assert perbit.tolist() == [1]


def test_csv_output_is_exact(tmp_path):
    rep = run(needle_config(3, 0.25, trials=3, master_seed=123))
    path = tmp_path / "trials.csv"
    write_trials_csv(rep, path)
    assert path.read_bytes() == b"trial,iterations\n0,52\n1,0\n2,22\n"


def test_config_validation():
    with pytest.raises(ValueError):
        needle_config(4, 0.1, trials=0, master_seed=1)
    with pytest.raises(ValueError):
        needle_config(4, 0.1, trials=10, master_seed=-1)
    with pytest.raises(ValueError):
        needle_config(4, 0.1, trials=10, master_seed=1 << 64)
    with pytest.raises(ValueError):
        needle_config(4, 0.1, trials=10, master_seed=1, iteration_cap=0)


def test_auto_cap_is_recorded():
    rep = run(needle_config(3, 0.25, trials=2, master_seed=1))
    # default cap: 1e4 times the analytic expectation, rounded up
    from plateau_rt import needle_time_uniform_start

    want = int(math.ceil(10**4 * needle_time_uniform_start(3, 0.25).value))
    assert rep.iteration_cap == want
