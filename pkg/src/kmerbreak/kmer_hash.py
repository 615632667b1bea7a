"""Rolling dual-strand hashing of DNA k-mers.

Produces a 64-bit hash for every k-long window of a nucleotide sequence.
Each window is hashed on the forward and the reverse-complement strand;
the canonical value is the smaller of the two, so a window and its
reverse complement always hash identically.  After the first window the
pair is updated in constant time per position from rotation tables
precomputed for the fixed k, instead of being rebuilt from scratch.

Windows containing a character outside ACGT (case-insensitive) have no
hash; streaming interfaces report them as invalid.
"""

from __future__ import annotations

import functools
from typing import Iterator, Optional, Sequence

import numpy as np

MASK64 = (1 << 64) - 1

#: Byte code marking a character outside ACGT/acgt.
INVALID = 255

# Fixed per-base seed values (one arbitrary 64-bit constant per base,
# order A, C, G, T).  They are published constants, not configuration:
# filter files built anywhere stay interchangeable only while every
# producer and consumer agrees on them.
BASE_SEEDS = (
    0xB6314576825C7E75,  # A
    0xD0EE9082E33869F2,  # C
    0xFCBFF42E1066FB1B,  # G
    0x1B8152343950DC91,  # T
)

#: Complement of each 2-bit base code (A<->T, C<->G).
COMPLEMENT_CODE = (3, 2, 1, 0)

_CODE_BY_CHAR = {
    "A": 0, "C": 1, "G": 2, "T": 3,
    "a": 0, "c": 1, "g": 2, "t": 3,
}

# 256-entry byte -> 2-bit code table; INVALID for anything else.
CODE_LUT = np.full(256, INVALID, dtype=np.uint8)
for _ch, _code in _CODE_BY_CHAR.items():
    CODE_LUT[ord(_ch)] = _code

_COMP_TRANSLATION = str.maketrans("ACGTacgt", "TGCAtgca")


def reverse_complement(seq: str) -> str:
    """Reverse complement of an ACGT/acgt string; other characters pass through."""
    return seq.translate(_COMP_TRANSLATION)[::-1]


def encode_bases(seq) -> np.ndarray:
    """Map a str/bytes sequence to 2-bit codes (uint8), INVALID outside ACGT."""
    if isinstance(seq, str):
        seq = seq.encode("ascii", "replace")
    return CODE_LUT[np.frombuffer(bytes(seq), dtype=np.uint8)]


def rol64(x: int, r: int) -> int:
    """Rotate a 64-bit value left by r (r may be any integer)."""
    r &= 63
    if r == 0:
        return x & MASK64
    x &= MASK64
    return ((x << r) & MASK64) | (x >> (64 - r))


def ror64(x: int, r: int) -> int:
    """Rotate a 64-bit value right by r."""
    return rol64(x, -r)


def _base_code(base) -> int:
    if isinstance(base, str):
        code = _CODE_BY_CHAR.get(base, INVALID)
    else:
        value = int(base)
        if 0 <= value < 4:
            code = value
        elif 0 <= value < 256:
            code = int(CODE_LUT[value])
        else:
            code = INVALID
    if code == INVALID:
        raise ValueError(f"base {base!r} is not one of ACGT")
    return code


class KmerHasher:
    """Stateful dual-strand window hasher for a fixed k.

    Holds the forward-strand and reverse-complement hashes of the current
    window.  ``init_window`` builds both in O(k); ``roll`` slides the
    window one position in O(1) using the rotate-by-k tables computed at
    construction.  Instances share nothing, so each scanning thread can
    own one.
    """

    __slots__ = ("k", "base_seeds", "comp_seeds", "rolk_base", "rolk_comp",
                 "fwd_hash", "rc_hash")

    def __init__(self, k: int, base_seeds: Sequence[int] = BASE_SEEDS):
        if k < 1:
            raise ValueError("k must be at least 1")
        seeds = tuple(int(s) & MASK64 for s in base_seeds)
        if len(seeds) != 4:
            raise ValueError("need exactly one seed per base")
        self.k = k
        self.base_seeds = seeds
        self.comp_seeds = tuple(seeds[c] for c in COMPLEMENT_CODE)
        self.rolk_base = tuple(rol64(s, k) for s in seeds)
        self.rolk_comp = tuple(rol64(s, k) for s in self.comp_seeds)
        self.fwd_hash: Optional[int] = None
        self.rc_hash: Optional[int] = None

    def init_window(self, window) -> "KmerHasher":
        """Build both strand hashes of a k-long window from scratch.

        ``window`` is a string or an iterable of base codes.  Raises
        ValueError when the window has the wrong length or a non-ACGT
        character.
        """
        codes = [_base_code(b) for b in window]
        k = self.k
        if len(codes) != k:
            raise ValueError(f"window length {len(codes)} differs from k={k}")
        fwd = 0
        rc = 0
        for i, c in enumerate(codes):
            fwd ^= rol64(self.base_seeds[c], k - 1 - i)
            rc ^= rol64(self.comp_seeds[c], i)
        self.fwd_hash = fwd
        self.rc_hash = rc
        return self

    def roll(self, outgoing, incoming) -> "KmerHasher":
        """Slide the window one position right in O(1).

        ``outgoing`` is the base leaving on the left, ``incoming`` the one
        entering on the right.  Both strand hashes are updated; the result
        equals re-initialising on the shifted window.
        """
        if self.fwd_hash is None:
            raise ValueError("no window initialised")
        out = _base_code(outgoing)
        inc = _base_code(incoming)
        self.fwd_hash = (rol64(self.fwd_hash, 1)
                         ^ self.rolk_base[out]
                         ^ self.base_seeds[inc])
        self.rc_hash = ror64(self.rc_hash
                             ^ self.comp_seeds[out]
                             ^ self.rolk_comp[inc], 1)
        return self

    def canonical(self) -> int:
        """Smaller of the two strand hashes; strand-symmetric by construction."""
        if self.fwd_hash is None:
            raise ValueError("no window initialised")
        return self.fwd_hash if self.fwd_hash < self.rc_hash else self.rc_hash


def stream_canonical(seq, k: int,
                     base_seeds: Sequence[int] = BASE_SEEDS) -> Iterator[Optional[int]]:
    """Yield the canonical hash at every window start of ``seq``.

    Yields None where the window covers a non-ACGT character.  Reference
    scalar path: the window is re-initialised after each invalid stretch
    and rolled exactly once per position otherwise, so hashing a clean
    sequence costs one O(k) init plus one O(1) roll per step.
    """
    codes = encode_bases(seq)
    hasher = KmerHasher(k, base_seeds)
    valid_run = 0
    for j in range(codes.size):
        if codes[j] == INVALID:
            valid_run = 0
        else:
            valid_run += 1
            if valid_run == k:
                hasher.init_window(codes[j - k + 1: j + 1])
            elif valid_run > k:
                hasher.roll(codes[j - k], codes[j])
        if j >= k - 1:
            yield hasher.canonical() if valid_run >= k else None


@functools.lru_cache(maxsize=8)
def _rotation_tables(base_seeds: tuple) -> tuple:
    """(64, 4) uint64 tables of rol(seed, r) for both strands' seeds."""
    comp = tuple(base_seeds[c] for c in COMPLEMENT_CODE)
    fwd = np.empty((64, 4), dtype=np.uint64)
    rc = np.empty((64, 4), dtype=np.uint64)
    for r in range(64):
        for b in range(4):
            fwd[r, b] = rol64(base_seeds[b], r)
            rc[r, b] = rol64(comp[b], r)
    return fwd, rc


def canonical_hashes(seq, k: int,
                     base_seeds: Sequence[int] = BASE_SEEDS) -> tuple[np.ndarray, np.ndarray]:
    """Canonical hash of every k-window of ``seq``, plus a validity mask.

    Batch equivalent of streaming a KmerHasher along the sequence:
    ``hashes[i]`` is the canonical value of ``seq[i:i+k]`` and ``valid[i]``
    is False where that window contains a non-ACGT character (the hash
    value there is meaningless).  The whole computation is k table
    gathers and XORs over numpy arrays, one pair per window offset.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    codes = encode_bases(seq)
    npos = codes.size - k + 1
    if npos <= 0:
        return np.empty(0, dtype=np.uint64), np.empty(0, dtype=bool)
    seeds = tuple(int(s) & MASK64 for s in base_seeds)
    ftab, rtab = _rotation_tables(seeds)
    bad = codes == INVALID
    safe = np.where(bad, np.uint8(0), codes)
    fwd = np.zeros(npos, dtype=np.uint64)
    rc = np.zeros(npos, dtype=np.uint64)
    for j in range(k):
        col = safe[j: j + npos]
        fwd ^= ftab[(k - 1 - j) % 64][col]
        rc ^= rtab[j % 64][col]
    bad_cum = np.concatenate(([0], np.cumsum(bad)))
    valid = (bad_cum[k:] - bad_cum[:-k]) == 0
    return np.minimum(fwd, rc), valid
