"""Distinct-count estimation over streams of 64-bit hashes.

Register sketch: the top p bits of each observed hash pick one of 2**p
one-byte registers, and the register keeps the largest rank (number of
leading zeros plus one) seen in the remaining 64-p bits.  Memory is 2**p
bytes no matter how long the stream is, and the relative error of the
estimate concentrates around 1.04 / sqrt(2**p).
"""

from __future__ import annotations

import math

import numpy as np

from .kmer_hash import MASK64

#: Default register-count exponent: 2**20 one-byte registers (1 MiB).
DEFAULT_P = 20


def _alpha(m: int) -> float:
    # Bias-correction constant for m registers.
    if m == 16:
        return 0.673
    if m == 32:
        return 0.697
    if m == 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / m)


class CardinalityEstimator:
    """Approximate number of distinct 64-bit hashes seen so far."""

    __slots__ = ("p", "registers")

    def __init__(self, p: int = DEFAULT_P):
        if not 4 <= p <= 24:
            raise ValueError("register exponent p must be in [4, 24]")
        self.p = p
        self.registers = np.zeros(1 << p, dtype=np.uint8)

    def observe(self, hash_value: int) -> "CardinalityEstimator":
        """Fold one hash into the sketch."""
        h = int(hash_value) & MASK64
        idx = h >> (64 - self.p)
        w = h & ((1 << (64 - self.p)) - 1)
        rank = (64 - self.p) - w.bit_length() + 1
        if rank > self.registers[idx]:
            self.registers[idx] = rank
        return self

    def observe_batch(self, hashes) -> "CardinalityEstimator":
        """Fold an array of hashes into the sketch at numpy speed."""
        hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
        if hashes.size == 0:
            return self
        p = self.p
        idx = (hashes >> np.uint64(64 - p)).astype(np.int64)
        # Suffix bits moved to the top of the word; its bit length then
        # determines the rank.  bit_length via smear-right + popcount.
        v = hashes << np.uint64(p)
        v |= v >> np.uint64(1)
        v |= v >> np.uint64(2)
        v |= v >> np.uint64(4)
        v |= v >> np.uint64(8)
        v |= v >> np.uint64(16)
        v |= v >> np.uint64(32)
        bit_len = np.bitwise_count(v).astype(np.int16)
        # rank = 65 - bit_len for a non-zero suffix; an all-zero suffix
        # saturates at the register ceiling 64 - p + 1.
        rank = np.minimum(65 - bit_len, 65 - p).astype(np.uint8)
        np.maximum.at(self.registers, idx, rank)
        return self

    def merge(self, other: "CardinalityEstimator") -> "CardinalityEstimator":
        """Absorb another sketch; equivalent to having seen both streams."""
        if other.p != self.p:
            raise ValueError("cannot merge sketches with different p")
        np.maximum(self.registers, other.registers, out=self.registers)
        return self

    def estimate(self) -> float:
        """Current distinct-count estimate (0.0 for an empty sketch)."""
        m = float(self.registers.size)
        inv_sum = float(np.ldexp(1.0, -self.registers.astype(np.int64)).sum())
        raw = _alpha(self.registers.size) * m * m / inv_sum
        if raw <= 2.5 * m:
            zeros = int(np.count_nonzero(self.registers == 0))
            if zeros:
                # Small-range correction: linear counting on empty registers.
                return m * math.log(m / zeros)
        return raw
