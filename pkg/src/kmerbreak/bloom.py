"""Bit-array membership filter for canonical k-mer hashes.

The filter is a power-of-two-sized bit array.  Each key is mapped to h
bit positions by multiplicative hashing: multiply by a fixed odd 64-bit
constant (one per hash function) and keep the top log2(m) bits of the
product.  A queried key is reported present when all its h bits are set,
so an inserted key is never missed and a fresh key collides with
probability close to ``fp_rate(n, m, h)``.

Sizing helpers translate a target false-positive rate and an expected
distinct count into the bit count and hash count, and snap the bit count
to a power of two so the index reduction stays a pure bit shift.
"""

from __future__ import annotations

import math
import struct
import threading
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .kmer_hash import BASE_SEEDS, MASK64

#: Serialized layout: 5 magic bytes, 1 version byte, k, h, log2m,
#: 8 reserved zero bytes, h little-endian index seeds, 4 little-endian
#: base seeds, then the bit array (bit i lives at byte i//8, bit i%8,
#: least significant bit first).
MAGIC = b"KEBAB"
VERSION = b"1"
HEADER_LEN = 17

LOG2M_MIN = 10
LOG2M_MAX = 40

# Fixed odd multipliers for the index hashes, one per hash function.
# Published constants for file interchange, same as the base seeds.
INDEX_SEEDS = (
    0x9E3779B97F4A7C15,
    0x6E789E6AA1B965F5,
    0x06C45D188009454F,
    0xF88BB8A8724C81ED,
    0x1B39896A51A8749B,
    0x53CB9F0C747EA2EB,
    0x2C829ABE1F4532E1,
    0xC584133AC916AB3D,
    0x3EE5789041C98AC3,
    0xF3B8488C368CB0A7,
    0x657EECDD3CB13D09,
    0xC2D326E0055BDEF7,
    0x8621A03FE0BBDB7B,
    0x8E1F7555983AA92F,
    0xB54E0F1600CC4D19,
    0x84BB3F97971D80AB,
    0x7D29825C75521255,
    0xC3CF17102B7F7F87,
    0x3466E9A083914F65,
    0xD81A8D2B5A4485AD,
    0xDB01602B100B9ED7,
    0xA9038A921825F10D,
    0xEDF5F1D90DCA2F6B,
    0x54496AD67BD2634D,
)


class FilterFormatError(ValueError):
    """Raised when serialized bytes do not decode to a valid filter."""


def _check_n_eps(n: int, eps: float) -> None:
    if n < 1:
        raise ValueError("expected distinct count n must be at least 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("false-positive rate must be strictly between 0 and 1")


def optimal_size(n: int, eps: float) -> tuple[int, int]:
    """Bit count and hash count minimising memory at false-positive rate eps.

    Returns (m, h) with m = ceil(-n ln eps / (ln 2)^2) and h the nearest
    integer to -ln(eps)/ln(2), at least 1.
    """
    _check_n_eps(n, eps)
    m = math.ceil(-n * math.log(eps) / math.log(2) ** 2)
    h = max(1, round(-math.log(eps) / math.log(2)))
    return m, h


def size_given_h(n: int, eps: float, h: int) -> int:
    """Minimal bit count reaching rate eps with the hash count fixed at h.

    Inverts the standard rate approximation (1 - e^{-hn/m})^h for m:
    m = ceil(-h n / ln(1 - eps^{1/h})).  With h left at its real-valued
    optimum this reduces to the jointly optimal size.
    """
    _check_n_eps(n, eps)
    if h < 1:
        raise ValueError("hash count h must be at least 1")
    return math.ceil(-h * n / math.log(1.0 - eps ** (1.0 / h)))


def round_pow2(m: int) -> int:
    """log2 of the power of two chosen for a requested bit count m.

    Rounds down, unless m is within 10% of the next power of two, in
    which case it rounds up.  The comparison is done in integers
    (10*m >= 9*next) so the band edge is exact.
    """
    if m < 2:
        raise ValueError("bit count must be at least 2")
    up = 1 << (m - 1).bit_length()
    if 10 * m >= 9 * up:
        return up.bit_length() - 1
    return m.bit_length() - 1


def fp_rate(n: int, m: int, h: int) -> float:
    """Predicted false-positive rate of an m-bit filter holding n keys."""
    if n < 0 or m < 1 or h < 1:
        raise ValueError("need n >= 0, m >= 1, h >= 1")
    return (1.0 - math.exp(-h * n / m)) ** h


class BloomFilter:
    """Fixed-size membership filter over 64-bit keys.

    ``insert`` takes the write lock so concurrent builders cannot lose
    bit sets; ``query`` is lock-free and safe once building is done.
    ``k`` and ``base_seeds`` record how keys were produced so a consumer
    of a deserialized filter hashes sequences the same way the producer
    did.
    """

    __slots__ = ("log2m", "h", "k", "index_seeds", "base_seeds",
                 "_bits", "_write_lock")

    def __init__(self, log2m: int, h: int, k: int,
                 index_seeds: Optional[Sequence[int]] = None,
                 base_seeds: Sequence[int] = BASE_SEEDS):
        if not LOG2M_MIN <= log2m <= LOG2M_MAX:
            raise ValueError(
                f"log2m must be in [{LOG2M_MIN}, {LOG2M_MAX}], got {log2m}")
        if h < 1:
            raise ValueError("need at least one index hash")
        if not 1 <= k <= 255:
            raise ValueError("k must fit in one byte")
        if index_seeds is None:
            if h > len(INDEX_SEEDS):
                raise ValueError(
                    f"at most {len(INDEX_SEEDS)} index hashes without explicit seeds")
            index_seeds = INDEX_SEEDS[:h]
        seeds = tuple(int(s) & MASK64 for s in index_seeds)
        if len(seeds) != h:
            raise ValueError("need exactly one index seed per hash")
        if any(s % 2 == 0 for s in seeds):
            raise ValueError("index seeds must be odd")
        self.log2m = log2m
        self.h = h
        self.k = k
        self.index_seeds = seeds
        self.base_seeds = tuple(int(s) & MASK64 for s in base_seeds)
        self._bits = np.zeros(1 << (log2m - 3), dtype=np.uint8)
        self._write_lock = threading.Lock()

    @property
    def m(self) -> int:
        """Bit-array size."""
        return 1 << self.log2m

    @property
    def nbytes(self) -> int:
        return self._bits.size

    def index(self, key: int, j: int) -> int:
        """Bit position of ``key`` under index hash ``j``."""
        return ((int(key) * self.index_seeds[j]) & MASK64) >> (64 - self.log2m)

    def insert(self, key: int) -> None:
        """Set the h bits of one key."""
        key = int(key) & MASK64
        shift = 64 - self.log2m
        with self._write_lock:
            for s in self.index_seeds:
                pos = ((key * s) & MASK64) >> shift
                self._bits[pos >> 3] |= np.uint8(1 << (pos & 7))

    def query(self, key: int) -> bool:
        """True when all h bits of the key are set (no false negatives)."""
        key = int(key) & MASK64
        shift = 64 - self.log2m
        for s in self.index_seeds:
            pos = ((key * s) & MASK64) >> shift
            if not self._bits[pos >> 3] & (1 << (pos & 7)):
                return False
        return True

    def _positions(self, keys: np.ndarray, seed: int) -> np.ndarray:
        # uint64 multiply wraps mod 2**64, matching the scalar path.
        return (keys * np.uint64(seed)) >> np.uint64(64 - self.log2m)

    def insert_batch(self, keys) -> None:
        """Insert an array of keys; one lock acquisition for the batch."""
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        if keys.size == 0:
            return
        updates = []
        for s in self.index_seeds:
            pos = self._positions(keys, s)
            byte = (pos >> np.uint64(3)).astype(np.int64)
            mask = np.left_shift(np.uint8(1), (pos & np.uint64(7)).astype(np.uint8))
            updates.append((byte, mask))
        with self._write_lock:
            for byte, mask in updates:
                np.bitwise_or.at(self._bits, byte, mask)

    def query_batch(self, keys) -> np.ndarray:
        """Boolean array: per-key result identical to ``query``."""
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        out = np.ones(keys.size, dtype=bool)
        for s in self.index_seeds:
            pos = self._positions(keys, s)
            byte = (pos >> np.uint64(3)).astype(np.int64)
            bit = (pos & np.uint64(7)).astype(np.uint8)
            out &= (self._bits[byte] >> bit) & np.uint8(1) != 0
        return out

    def fill_fraction(self) -> float:
        """Fraction of set bits; diagnostic for load checks."""
        return float(np.bitwise_count(self._bits).sum()) / self.m

    def to_bytes(self) -> bytes:
        head = bytearray()
        head += MAGIC
        head += VERSION
        head += bytes((self.k, self.h, self.log2m))
        head += b"\x00" * 8
        for s in self.index_seeds:
            head += struct.pack("<Q", s)
        for s in self.base_seeds:
            head += struct.pack("<Q", s)
        return bytes(head) + self._bits.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BloomFilter":
        if len(data) < HEADER_LEN:
            raise FilterFormatError("truncated filter: header incomplete")
        if data[:5] != MAGIC:
            raise FilterFormatError("bad magic bytes; not a filter file")
        if data[5:6] != VERSION:
            raise FilterFormatError(
                f"unsupported filter format version {data[5:6]!r}")
        k, h, log2m = data[6], data[7], data[8]
        if h < 1:
            raise FilterFormatError("filter header declares zero hashes")
        if not LOG2M_MIN <= log2m <= LOG2M_MAX:
            raise FilterFormatError(f"filter header log2m {log2m} out of range")
        expected = HEADER_LEN + 8 * h + 32 + (1 << (log2m - 3))
        if len(data) != expected:
            raise FilterFormatError(
                f"filter size mismatch: expected {expected} bytes, got {len(data)}")
        off = HEADER_LEN
        index_seeds = struct.unpack_from(f"<{h}Q", data, off)
        off += 8 * h
        base_seeds = struct.unpack_from("<4Q", data, off)
        off += 32
        try:
            filt = cls(log2m, h, k, index_seeds=index_seeds, base_seeds=base_seeds)
        except ValueError as exc:
            raise FilterFormatError(str(exc)) from None
        filt._bits = np.frombuffer(data[off:], dtype=np.uint8).copy()
        return filt

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "BloomFilter":
        return cls.from_bytes(Path(path).read_bytes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BloomFilter):
            return NotImplemented
        return (self.log2m == other.log2m and self.h == other.h
                and self.k == other.k
                and self.index_seeds == other.index_seeds
                and self.base_seeds == other.base_seeds
                and bool(np.array_equal(self._bits, other._bits)))

    __hash__ = None
