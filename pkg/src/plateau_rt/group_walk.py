"""Random walk induced by bitwise mutation on fixed-length bit vectors.

Length-ell bit vectors form a group under XOR, and flipping each bit
independently with probability p makes the (1+1) EA on a flat landscape
a random walk driven by a single step distribution mu.  The characters
of the group diagonalize the walk, which is what makes exact hitting
times computable without ever touching a 2^ell x 2^ell matrix: the
Fourier transform of mu at a character indexed by v is (1-2p)^|v|, a
function of the Hamming weight of v alone.

``hitting_time_from_zero`` evaluates the resulting character sum by
explicit enumeration over all 2^ell characters.  That is the raw form;
the weight-grouped rearrangements that scale past the enumeration cap
live in :mod:`plateau_rt.runtime_formulas`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .exceptions import CapacityError

__all__ = [
    "ENUMERATION_CAP",
    "BitString",
    "check_rate",
    "mu_mass",
    "character_eval",
    "fourier_mu",
    "hitting_time_from_zero",
]

# Above this length the 2^ell character enumeration is refused.
ENUMERATION_CAP = 24

_CHUNK = 1 << 20


def check_rate(p: float) -> float:
    """Validate a per-bit mutation rate.  Returns p unchanged.

    Any p with 0 < p < 1 is legal, including p = 0.5 and rates above
    0.5; the endpoints make the walk degenerate and are rejected.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must lie strictly between 0 and 1, got {p!r}")
    return p


@dataclass(frozen=True)
class BitString:
    """Immutable bit vector of fixed length.

    Bits are packed into a single int; bit i of ``value`` is coordinate
    i.  Only indexed access and Hamming weight are part of the
    contract, the packing is an implementation detail.
    """

    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} out of range for length {self.length}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        seq = list(bits)
        value = 0
        for i, b in enumerate(seq):
            if b not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {b!r}")
            value |= b << i
        return cls(value, len(seq))

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        return cls.from_bits(int(ch) for ch in s)

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> "BitString":
        return cls((1 << length) - 1, length)

    @property
    def weight(self) -> int:
        """Hamming weight."""
        return self.value.bit_count()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return ((self.value >> i) & 1 for i in range(self.length))

    def __xor__(self, other: "BitString") -> "BitString":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitString(self.value ^ other.value, self.length)


def _require_same_length(a: BitString, b: BitString) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")


def mu_mass(w: BitString, p: float) -> float:
    """Probability that one mutation flips exactly the coordinates of w.

    Each bit flips independently with probability p, so the mass is
    p^|w| (1-p)^(ell-|w|).  Depends on w only through its weight.
    """
    check_rate(p)
    k = w.weight
    return p**k * (1.0 - p) ** (w.length - k)


def character_eval(v: BitString, w: BitString) -> int:
    """Character indexed by v evaluated at w: (-1)^(v . w).  Returns +1 or -1."""
    _require_same_length(v, w)
    return -1 if (v.value & w.value).bit_count() & 1 else 1


def fourier_mu(v: BitString, p: float) -> float:
    """Fourier transform of the mutation step law at the character of v.

    Equals (1-2p)^|v|; in particular 1 at the trivial character and 0
    for every nontrivial character when p = 0.5.
    """
    check_rate(p)
    return (1.0 - 2.0 * p) ** v.weight


def hitting_time_from_zero(g: BitString, p: float) -> float:
    """Expected steps for the mutation walk to first hit g, starting at 0.

    Direct evaluation of the spectral sum
        sum over v != 0 of (1 - chi_v(g)) / (1 - (1-2p)^|v|),
    enumerating all 2^ell characters.  Only characters with odd overlap
    with g contribute.  Grows as 2^ell; lengths above ENUMERATION_CAP
    raise CapacityError (use the weight-grouped sums in
    runtime_formulas for large ell).
    """
    check_rate(p)
    ell = g.length
    if ell > ENUMERATION_CAP:
        raise CapacityError(
            f"character enumeration needs 2^{ell} terms (cap is 2^{ENUMERATION_CAP}); "
            "use the weight-grouped forms in plateau_rt.runtime_formulas"
        )
    if g.value == 0:
        return 0.0

    # 1/(1 - (1-2p)^j) by weight class; index 0 is never used because the
    # trivial character has zero overlap with g.
    base = 1.0 - 2.0 * p
    inv_denom = np.empty(ell + 1)
    inv_denom[0] = 0.0
    for j in range(1, ell + 1):
        inv_denom[j] = 1.0 / (1.0 - base**j)

    gv = np.uint32(g.value)
    partials = []
    for lo in range(0, 1 << ell, _CHUNK):
        hi = min(lo + _CHUNK, 1 << ell)
        v = np.arange(lo, hi, dtype=np.uint32)
        w = np.bitwise_count(v).astype(np.int64)
        odd = np.bitwise_count(v & gv) & 1
        # terms: 2/(1-(1-2p)^|v|) where overlap is odd, else 0
        chunk = 2.0 * odd * inv_denom[w]
        partials.append(float(np.add.reduce(chunk)))
    return math.fsum(partials)
