# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel.

Twin of the pure-Python kernel in ``_kernel_py``: same splitmix64
stream, same draw order, same clamps, bit-identical trials.  Any edit
here must be mirrored there.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memset

KIND_BLO = 0
KIND_BLOCK = 1

KERNEL_NAME = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9UL
cdef uint64_t MIX_B = 0x94D049BB133111EBUL
cdef double INV53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z ^= z >> 30
    z *= MIX_A
    z ^= z >> 27
    z *= MIX_B
    z ^= z >> 31
    return z


cdef inline uint64_t _trial_seed(uint64_t master_seed, uint64_t trial) nogil:
    return _mix64(master_seed + (trial + 1) * GOLDEN)


cdef inline uint64_t _next_u64(uint64_t* state) nogil:
    state[0] += GOLDEN
    return _mix64(state[0])


cdef inline double _next_double(uint64_t* state) nogil:
    return <double>(_next_u64(state) >> 11) * INV53


def trial_seed(master_seed, trial):
    """Initial stream state for one trial; matches _kernel_py.trial_seed."""
    return int(_trial_seed(<uint64_t>master_seed, <uint64_t>trial))


cdef inline int64_t _first_zero(uint64_t* x, int64_t nbits) nogil:
    """Index of the lowest zero bit, or nbits if all ones."""
    cdef int64_t nwords = (nbits + 63) >> 6
    cdef int64_t wi, base = 0, i, width
    cdef uint64_t inv, wordmask
    for wi in range(nwords):
        width = nbits - base
        if width > 64:
            width = 64
        wordmask = (<uint64_t>0xFFFFFFFFFFFFFFFFUL) >> (64 - width)
        inv = (~x[wi]) & wordmask
        if inv != 0:
            i = 0
            while not (inv & 1):
                inv >>= 1
                i += 1
            return base + i
        base += 64
    return nbits


cdef inline void _sample_flips(uint64_t* state, uint64_t* flips, int64_t nwords,
                               int64_t nbits, double p, uint8_t perbit,
                               const double* cdf, int64_t* idx) nogil:
    cdef int64_t i, j, d, r, span, pos
    cdef double u
    memset(flips, 0, nwords * sizeof(uint64_t))
    if perbit:
        for i in range(nbits):
            if _next_double(state) < p:
                flips[i >> 6] |= (<uint64_t>1) << (i & 63)
        return
    u = _next_double(state)
    d = 0
    while u > cdf[d]:
        d += 1
    for j in range(d):
        u = _next_double(state)
        span = nbits - j
        r = <int64_t>(u * <double>span)
        if r >= span:  # guard the 1-ulp rounding edge of u*span
            r = span - 1
        r += j
        pos = idx[r]
        idx[r] = idx[j]
        idx[j] = pos
        flips[pos >> 6] |= (<uint64_t>1) << (pos & 63)


def run_trials(int kind, int64_t nbits, int64_t ell, int64_t levels,
               double[::1] rates, double[:, ::1] cdfs, uint8_t[::1] perbit,
               int64_t cap, unsigned long long master_seed,
               int64_t start, int64_t stop,
               int64_t[::1] out_iters, uint8_t[::1] out_capped,
               int64_t[:, ::1] out_levels):
    """Run trials [start, stop) and write per-trial results into the out arrays."""
    cdef int64_t nwords = (nbits + 63) >> 6
    cdef int64_t k_locked = nbits - ell

    x_buf = np.zeros(nwords, dtype=np.uint64)
    y_buf = np.zeros(nwords, dtype=np.uint64)
    f_buf = np.zeros(nwords, dtype=np.uint64)
    idx_buf = np.zeros(nbits, dtype=np.int64)
    lt_buf = np.zeros(levels, dtype=np.int64)
    cdef uint64_t[::1] x_mv = x_buf
    cdef uint64_t[::1] y_mv = y_buf
    cdef uint64_t[::1] f_mv = f_buf
    cdef int64_t[::1] idx_mv = idx_buf
    cdef int64_t[::1] lt_mv = lt_buf
    cdef uint64_t* x = &x_mv[0]
    cdef uint64_t* y = &y_mv[0]
    cdef uint64_t* flips = &f_mv[0]
    cdef int64_t* idx = &idx_mv[0]
    cdef int64_t* ltimes = &lt_mv[0]

    cdef uint64_t ms = <uint64_t>master_seed
    cdef uint64_t state, v, ell_mask, tailmask
    cdef int64_t t, wi, i, iters, m, fy, width, b
    cdef uint8_t capped
    cdef double p

    ell_mask = 0
    if ell < 64:
        ell_mask = ((<uint64_t>1) << ell) - 1

    with nogil:
        for t in range(start, stop):
            state = _trial_seed(ms, <uint64_t>t)

            if kind == 1:
                # locked prefix all ones
                for wi in range(nwords):
                    x[wi] = 0
                for i in range(k_locked):
                    x[i >> 6] |= (<uint64_t>1) << (i & 63)
                # uniform non-optimal block content by rejection
                v = _next_u64(&state) & ell_mask
                while v == ell_mask:
                    v = _next_u64(&state) & ell_mask
                for b in range(ell):
                    if (v >> b) & 1:
                        i = k_locked + b
                        x[i >> 6] |= (<uint64_t>1) << (i & 63)
            else:
                for wi in range(nwords):
                    x[wi] = _next_u64(&state)
                width = nbits - 64 * (nwords - 1)
                tailmask = (<uint64_t>0xFFFFFFFFFFFFFFFFUL) >> (64 - width)
                x[nwords - 1] &= tailmask

            for i in range(nbits):
                idx[i] = i
            for i in range(levels):
                ltimes[i] = 0
            iters = 0
            capped = 0

            if kind == 0:
                m = _first_zero(x, nbits) // ell
                while m < levels:
                    if iters >= cap:
                        capped = 1
                        break
                    ltimes[m] += 1
                    iters += 1
                    _sample_flips(&state, flips, nwords, nbits, rates[m], perbit[m],
                                  &cdfs[m, 0], idx)
                    for wi in range(nwords):
                        y[wi] = x[wi] ^ flips[wi]
                    fy = _first_zero(y, nbits) // ell
                    if fy >= m:
                        for wi in range(nwords):
                            x[wi] = y[wi]
                        m = fy
            else:
                p = rates[0]
                while _first_zero(x, nbits) < nbits:
                    if iters >= cap:
                        capped = 1
                        break
                    ltimes[0] += 1
                    iters += 1
                    _sample_flips(&state, flips, nwords, nbits, p, perbit[0],
                                  &cdfs[0, 0], idx)
                    for wi in range(nwords):
                        y[wi] = x[wi] ^ flips[wi]
                    if _first_zero(y, nbits) >= k_locked:
                        for wi in range(nwords):
                            x[wi] = y[wi]

            out_iters[t] = iters
            out_capped[t] = capped
            for i in range(levels):
                out_levels[t, i] = ltimes[i]
