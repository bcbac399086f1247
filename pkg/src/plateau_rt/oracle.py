"""Independent Markov-chain solvers used to cross-check the formulas.

Everything here deliberately avoids the Fourier route: chains are built
from the raw mutation/acceptance mechanics and hitting times come out
of dense linear solves (absorbing systems for the small chains, a
stationary-centered system for the lumped one).  Slow and memory-hungry by design,
but trustworthy, which is the point.

Three levels of resolution:

* ``full_state_hitting_times``: all 2^ell states of the flat-landscape
  walk (ell <= 12).
* ``lumped_hitting_times``: the walk lumped by Hamming distance to the
  target, ell+1 states (ell <= 512).
* ``lo_chain_time``: the full (1+1) EA on block-leading-ones over
  2^n states, including the acceptance step (n <= 14).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import CapacityError
from .group_walk import check_rate

__all__ = [
    "FULL_STATE_CAP",
    "LUMPED_CAP",
    "LO_CHAIN_CAP",
    "LumpedChain",
    "full_state_hitting_times",
    "lumped_hitting_times",
    "build_lumped_chain",
    "lo_chain_time",
]

FULL_STATE_CAP = 12
LUMPED_CAP = 512
LO_CHAIN_CAP = 14

_RESIDUAL_TOL = 1e-9


def _guarded_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A h = b with a residual guarantee.

    Iterative refinement is applied until the infinity-norm residual
    drops below 1e-9 relative to the solution scale max(1, |h|_inf);
    hitting times of barely-escapable plateaus reach 1e30, where an
    absolute residual of 1e-9 has no meaning in doubles.  For the small
    solves (everything with |h| up to ~1e4) the achieved residual is
    absolute 1e-9 or better.  Failure to converge is an internal error,
    not a value to hand back.
    """
    with warnings.catch_warnings():
        # the residual contract below supersedes scipy's rcond heuristic
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        h = scipy.linalg.solve(A, b)
        for _ in range(2):
            r = b - A @ h
            scale = max(1.0, float(np.max(np.abs(h))))
            if np.max(np.abs(r)) <= _RESIDUAL_TOL * scale:
                return h
            h = h + scipy.linalg.solve(A, r)
    r = b - A @ h
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(r)) > _RESIDUAL_TOL * scale:
        raise RuntimeError(
            f"hitting-time solve residual {np.max(np.abs(r)):.3e} exceeds "
            f"{_RESIDUAL_TOL:.0e} at solution scale {scale:.3e}"
        )
    return h


def _popcounts(n_values: int) -> np.ndarray:
    return np.bitwise_count(np.arange(n_values, dtype=np.uint32)).astype(np.int64)


def full_state_hitting_times(ell: int, p: float, target: int | None = None) -> np.ndarray:
    """Expected hitting times of ``target`` for the mutation walk on 2^ell states.

    Returns a vector h indexed by state (bits packed into ints) with
    h[target] = 0.  The walk has no acceptance step: on a flat landscape
    every mutation is an accepted move.  Memory grows as 4^ell, hence
    the cap at ell = 12.
    """
    check_rate(p)
    if not 1 <= ell <= FULL_STATE_CAP:
        raise CapacityError(f"full-state oracle supports 1 <= ell <= {FULL_STATE_CAP}, got {ell}")
    size = 1 << ell
    if target is None:
        target = size - 1
    if not 0 <= target < size:
        raise ValueError(f"target {target} out of range for ell={ell}")

    states = np.arange(size, dtype=np.uint32)
    pc = _popcounts(size)
    D = pc[np.bitwise_xor.outer(states, states)]
    powp = p ** np.arange(ell + 1)
    powq = (1.0 - p) ** np.arange(ell + 1)
    P = powp[D] * powq[ell - D]

    keep = states != target
    Q = P[np.ix_(keep, keep)]
    A = np.eye(size - 1) - Q
    h_transient = _guarded_solve(A, np.ones(size - 1))

    h = np.zeros(size)
    h[keep] = h_transient
    return h


@dataclass(frozen=True)
class LumpedChain:
    """Distance-to-target chain of the mutation walk.

    State d in 0..ell is the Hamming distance to the target; the
    transition matrix is exact because the walk is symmetric under
    permuting coordinates.
    """

    ell: int
    p: float
    transition: np.ndarray


def _binom_pmf(n: int, p: float) -> np.ndarray:
    """Binomial(n, p) pmf, assembled in the log domain.

    Binomial coefficients are taken exactly and rounded once at the
    log, so the pmf stays accurate out to ell = 512 and tiny p.
    """
    if n == 0:
        return np.ones(1)
    k = np.arange(n + 1)
    logc = np.array([math.log(math.comb(n, int(j))) for j in k])
    return np.exp(logc + k * np.log(p) + (n - k) * np.log1p(-p))


def build_lumped_chain(ell: int, p: float) -> LumpedChain:
    """Assemble the (ell+1)-state distance chain, validating row masses."""
    check_rate(p)
    if not 1 <= ell <= LUMPED_CAP:
        raise CapacityError(f"lumped oracle supports 1 <= ell <= {LUMPED_CAP}, got {ell}")
    T = np.zeros((ell + 1, ell + 1))
    for d in range(ell + 1):
        # k1 flips among the d wrong bits, k2 among the ell-d right ones
        pmf_wrong = _binom_pmf(d, p)
        pmf_right = _binom_pmf(ell - d, p)
        mass = np.outer(pmf_wrong, pmf_right)
        dprime = d - np.arange(d + 1)[:, None] + np.arange(ell - d + 1)[None, :]
        np.add.at(T[d], dprime.ravel(), mass.ravel())
    row_err = np.max(np.abs(T.sum(axis=1) - 1.0))
    if row_err > 1e-12:
        raise RuntimeError(f"lumped chain rows deviate from stochasticity by {row_err:.3e}")
    return LumpedChain(ell=ell, p=p, transition=T)


def lumped_hitting_times(ell: int, p: float) -> np.ndarray:
    """Expected hitting times of distance class 0, indexed by start distance.

    Solved through the stationary-centered form: with K the inverse of
    I - P + 1 pi^T (pi the binomial stationary law of the distance
    chain), E_d[tau_0] = (K[0,0] - K[d,0]) / pi[0].  The centered matrix
    has spectral gap ~2p, so the solve stays accurate even when hitting
    times reach 2^ell scale, where the naive absorbing system is
    numerically singular.  Equivalent to the absorbing solve, and
    checked against it class-wise at small ell.
    """
    chain = build_lumped_chain(ell, p)
    P = chain.transition
    # stationary law of the distance chain: Binomial(ell, 1/2)
    log_pi = np.array(
        [math.log(math.comb(ell, d)) - ell * math.log(2.0) for d in range(ell + 1)]
    )
    pi = np.exp(log_pi)
    drift = float(np.max(np.abs(pi @ P - pi)))
    if drift > 1e-12:
        raise RuntimeError(f"stationary law violated by {drift:.3e}")
    A = np.eye(ell + 1) - P + np.outer(np.ones(ell + 1), pi)
    e0 = np.zeros(ell + 1)
    e0[0] = 1.0
    z = _guarded_solve(A, e0)
    h = (z[0] - z) / pi[0]
    h[0] = 0.0
    return h


def _blo_fitness_table(n: int, ell: int) -> np.ndarray:
    """floor(LeadingOnes/ell) for every state, bit i = coordinate i."""
    size = 1 << n
    states = np.arange(size, dtype=np.uint64)
    lo = np.zeros(size, dtype=np.int64)
    alive = np.ones(size, dtype=bool)
    for i in range(n):
        alive &= ((states >> np.uint64(i)) & np.uint64(1)) == 1
        lo += alive
    return lo // ell


def lo_chain_time(n: int, ell: int, p_schedule) -> float:
    """Expected (1+1) EA runtime on block-leading-ones from a 2^n-state solve.

    ``p_schedule`` gives the mutation rate used while the current
    fitness is m, for m = 0 .. n/ell - 1.  The chain applies the real
    EA kernel: mutate every bit, accept iff fitness does not drop.
    Returns the expected absorption time from a uniform random start.
    Dense in 2^n, so memory grows as 4^n; capped at n = 14.
    """
    if not 1 <= n <= LO_CHAIN_CAP:
        raise CapacityError(f"lo-chain oracle supports 1 <= n <= {LO_CHAIN_CAP}, got {n}")
    if n % ell != 0:
        raise ValueError(f"block length {ell} must divide n={n}")
    levels = n // ell
    rates = [check_rate(p) for p in p_schedule]
    if len(rates) != levels:
        raise ValueError(f"schedule must list {levels} rates (one per fitness level), got {len(rates)}")

    size = 1 << n
    target = size - 1
    fitness = _blo_fitness_table(n, ell)
    pc = _popcounts(size)

    # mask weight -> mutation mass, one row per fitness level
    mask_mass = np.empty((levels, size))
    for m, p in enumerate(rates):
        powp = p ** np.arange(n + 1)
        powq = (1.0 - p) ** np.arange(n + 1)
        mask_mass[m] = powp[pc] * powq[n - pc]

    P = np.zeros((size, size))
    masks = np.arange(size, dtype=np.int64)
    for x in range(size):
        if x == target:
            continue
        y = x ^ masks
        acc = fitness[y] >= fitness[x]
        pm = mask_mass[fitness[x]]
        row = P[x]
        row[y[acc]] = pm[acc]
        row[x] += pm[~acc].sum()

    keep = np.arange(size) != target
    Q = P[np.ix_(keep, keep)]
    A = np.eye(size - 1) - Q
    h_transient = _guarded_solve(A, np.ones(size - 1))
    h = np.zeros(size)
    h[keep] = h_transient
    return float(h.mean())
