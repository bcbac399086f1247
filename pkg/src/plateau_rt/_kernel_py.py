"""Pure-Python simulation kernel.

Twin of the compiled kernel in ``_kernel_cy.pyx``.  Both consume the
same splitmix64 stream in exactly the same order, use the same
precomputed flip-count tables, the same float operations and the same
clamps, so for any (master_seed, trial) pair the two kernels produce
bit-identical trials.  Any edit here must be mirrored there.

Trial kinds:

* ``KIND_BLO`` (0): the (1+1) EA on block-leading-ones over nbits bits
  with a per-fitness-level rate table.  Needle is the single-block
  special case nbits == ell.
* ``KIND_BLOCK`` (1): one active block of length ell behind
  nbits - ell locked all-ones bits; the block starts uniform among
  non-optimal contents.  Flips in the locked prefix get the offspring
  rejected; the accepted walk is the plateau walk.
"""

from __future__ import annotations

M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV53 = 2.0**-53

KIND_BLO = 0
KIND_BLOCK = 1

KERNEL_NAME = "python"


def _mix64(z: int) -> int:
    z &= M64
    z ^= z >> 30
    z = (z * _MIX_A) & M64
    z ^= z >> 27
    z = (z * _MIX_B) & M64
    z ^= z >> 31
    return z


def trial_seed(master_seed: int, trial: int) -> int:
    """Initial stream state for one trial: a documented, stable mixing."""
    return _mix64((master_seed + (trial + 1) * _GOLDEN) & M64)


class _Stream:
    """splitmix64, the counter-based stream used by both kernels."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & M64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & M64
        return _mix64(self.state)

    def next_double(self) -> float:
        # 53-bit uniform in [0, 1)
        return (self.next_u64() >> 11) * _INV53


def _fitness(x: int, full_mask: int, ell: int, levels: int) -> int:
    """floor(first zero position / ell); ``levels`` when all ones."""
    z = ~x & full_mask
    if z == 0:
        return levels
    return ((z & -z).bit_length() - 1) // ell


def _sample_mask(rng: _Stream, nbits: int, p: float, perbit: bool, cdf, idx) -> int:
    """Draw one mutation's flip mask.

    Per-bit path: one uniform per bit.  Count path: one uniform picks
    the flip count d off the cdf table, then d uniforms pick distinct
    positions by partial Fisher-Yates on the persistent idx array.
    """
    if perbit:
        mask = 0
        bit = 1
        for _ in range(nbits):
            if rng.next_double() < p:
                mask |= bit
            bit <<= 1
        return mask
    u = rng.next_double()
    d = 0
    while u > cdf[d]:
        d += 1
    mask = 0
    for j in range(d):
        u = rng.next_double()
        span = nbits - j
        r = int(u * span)
        if r >= span:  # guard the 1-ulp rounding edge of u*span
            r = span - 1
        r += j
        idx[j], idx[r] = idx[r], idx[j]
        mask |= 1 << idx[j]
    return mask


def run_trials(
    kind,
    nbits,
    ell,
    levels,
    rates,
    cdfs,
    perbit,
    cap,
    master_seed,
    start,
    stop,
    out_iters,
    out_capped,
    out_levels,
):
    """Run trials [start, stop) and write per-trial results into the out arrays."""
    full_mask = (1 << nbits) - 1
    nwords = (nbits + 63) >> 6
    rates_l = [float(r) for r in rates]
    perbit_l = [bool(b) for b in perbit]
    cdf_rows = [[float(c) for c in row] for row in cdfs]
    k_locked = nbits - ell
    pref_mask = (1 << k_locked) - 1
    block_mask = full_mask ^ pref_mask
    ell_mask = (1 << ell) - 1
    cap = int(cap)

    for t in range(start, stop):
        rng = _Stream(trial_seed(master_seed, t))
        if kind == KIND_BLOCK:
            # uniform non-optimal block content by rejection
            v = rng.next_u64() & ell_mask
            while v == ell_mask:
                v = rng.next_u64() & ell_mask
            x = pref_mask | (v << k_locked)
        else:
            x = 0
            shift = 0
            for _ in range(nwords):
                x |= rng.next_u64() << shift
                shift += 64
            x &= full_mask

        idx = list(range(nbits))
        iters = 0
        capped = 0
        ltimes = [0] * levels

        if kind == KIND_BLO:
            m = _fitness(x, full_mask, ell, levels)
            while m < levels:
                if iters >= cap:
                    capped = 1
                    break
                ltimes[m] += 1
                iters += 1
                flips = _sample_mask(rng, nbits, rates_l[m], perbit_l[m], cdf_rows[m], idx)
                y = x ^ flips
                fy = _fitness(y, full_mask, ell, levels)
                if fy >= m:
                    x = y
                    m = fy
        else:
            p = rates_l[0]
            pb = perbit_l[0]
            row = cdf_rows[0]
            while (x & block_mask) != block_mask:
                if iters >= cap:
                    capped = 1
                    break
                ltimes[0] += 1
                iters += 1
                flips = _sample_mask(rng, nbits, p, pb, row, idx)
                y = x ^ flips
                if (y & pref_mask) == pref_mask:
                    x = y

        out_iters[t] = iters
        out_capped[t] = capped
        for i in range(levels):
            out_levels[t, i] = ltimes[i]


def trial_fitness_trajectory(nbits, ell, levels, rates, cdfs, perbit, cap, master_seed, trial):
    """Fitness at the start of every iteration of one KIND_BLO trial.

    Test helper: replays the exact stream of ``run_trials`` and records
    the fitness path, final fitness appended last.
    """
    full_mask = (1 << nbits) - 1
    nwords = (nbits + 63) >> 6
    rng = _Stream(trial_seed(master_seed, trial))
    x = 0
    shift = 0
    for _ in range(nwords):
        x |= rng.next_u64() << shift
        shift += 64
    x &= full_mask
    idx = list(range(nbits))
    cdf_rows = [[float(c) for c in row] for row in cdfs]
    path = []
    m = _fitness(x, full_mask, ell, levels)
    iters = 0
    while m < levels and iters < cap:
        path.append(m)
        iters += 1
        flips = _sample_mask(rng, nbits, float(rates[m]), bool(perbit[m]), cdf_rows[m], idx)
        y = x ^ flips
        fy = _fitness(y, full_mask, ell, levels)
        if fy >= m:
            x = y
            m = fy
    path.append(m)
    return path
