"""Ground-truth references the fast paths are judged against.

Everything here trades speed for being obviously correct: a quadratic
maximal-exact-match finder, an error-free k-mer membership set, a
segment finder built on literal substring sets instead of hashes, and
the early-stopping selector that searches length-sorted segments until
further segments can no longer contribute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .kmer_hash import (BASE_SEEDS, INVALID, canonical_hashes, encode_bases,
                        reverse_complement)


@dataclass(frozen=True, order=True)
class Mem:
    """Maximal exact match: pattern[start:end] occurs in the text and can
    be extended neither left nor right at any of its text occurrences."""
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


def brute_mems(pattern: str, text: str, min_len: int) -> List[Mem]:
    """All maximal exact matches of ``pattern`` in ``text`` with length at
    least ``min_len``, by direct character comparison.

    O(|pattern| * |text|) time, O(|text|) extra space.  Uses no hashing
    or index structure, so it can arbitrate them.  Matching is
    case-insensitive over ACGT; a non-ACGT character never matches
    anything, itself included.
    """
    if min_len < 1:
        raise ValueError("min_len must be at least 1")
    p = encode_bases(pattern)
    t = encode_bases(text)
    # Distinct sentinels so invalid pattern chars never equal invalid text chars.
    p = np.where(p == INVALID, np.uint8(INVALID - 1), p)
    m = p.size
    n = t.size
    if m == 0 or n == 0:
        return []
    # longest[i] = length of the longest prefix of pattern[i:] occurring in
    # the text, via the suffix-match recurrence row by row (i descending).
    longest = np.zeros(m, dtype=np.int64)
    row = np.zeros(n, dtype=np.int64)
    nxt = np.zeros(n, dtype=np.int64)
    for i in range(m - 1, -1, -1):
        nxt[:-1] = row[1:]
        nxt[-1] = 0
        np.add(nxt, 1, out=nxt)
        row = np.where(t == p[i], nxt, 0)
        longest[i] = row.max()
    # A match starting at i is right-maximal by the definition of longest[i]
    # and left-maximal exactly when no longer-or-equal match covers it from
    # the left, i.e. longest[i-1] <= longest[i].
    mems: List[Mem] = []
    for i in range(m):
        li = int(longest[i])
        if li >= min_len and (i == 0 or longest[i - 1] <= li):
            mems.append(Mem(i, i + li))
    return mems


class ExactKmerFilter:
    """Zero-error membership over the canonical k-mers of reference texts.

    Presents the same query surface as the probabilistic filter (``k``,
    ``base_seeds``, ``query``, ``query_batch``) so the two are
    interchangeable wherever a filter is scanned, with the exact one
    reporting no false positives at all.
    """

    def __init__(self, texts, k: int, base_seeds: Sequence[int] = BASE_SEEDS):
        if k < 1:
            raise ValueError("k must be at least 1")
        if isinstance(texts, str):
            texts = [texts]
        self.k = k
        self.base_seeds = tuple(int(s) for s in base_seeds)
        members = set()
        for text in texts:
            canon, valid = canonical_hashes(text, k, self.base_seeds)
            members.update(canon[valid].tolist())
        self._members = members

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, key) -> bool:
        return int(key) in self._members

    def query(self, key) -> bool:
        return int(key) in self._members

    def query_batch(self, keys) -> np.ndarray:
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        members = self._members
        return np.fromiter((int(x) in members for x in keys),
                           dtype=bool, count=keys.size)


def maximal_segments(read: str, text: str, k: int,
                     min_len: int) -> List[tuple[int, int]]:
    """Maximal substrings of ``read`` (length >= min_len) whose k-mers all
    occur in ``text`` on either strand.

    Built on literal substring sets, no hashing, as an independent check
    on the scanning path.  Returns half-open (start, end) pairs in read
    coordinates.
    """
    if min_len <= k:
        raise ValueError("min_len must exceed k")
    acgt = frozenset("ACGT")
    kmers = set()
    up_text = text.upper()
    for i in range(len(up_text) - k + 1):
        w = up_text[i: i + k]
        if acgt.issuperset(w):
            kmers.add(w)
            kmers.add(reverse_complement(w))
    rd = read.upper()
    npos = len(rd) - k + 1
    # kmers holds ACGT strings only, so windows with other characters miss.
    hits = [rd[i: i + k] in kmers for i in range(max(npos, 0))]
    segments: List[tuple[int, int]] = []
    i = 0
    while i < len(hits):
        if hits[i]:
            j = i
            while j + 1 < len(hits) and hits[j + 1]:
                j += 1
            if (j + k) - i >= min_len:
                segments.append((i, j + k))
            i = j + 1
        i += 1
    return segments


def early_stop_select(segments: Sequence, mem_finder: Callable[[object], Iterable],
                      t: int) -> list:
    """Search length-sorted segments until the rest cannot change the top t.

    ``segments`` must be sorted by non-increasing length.  Before each
    segment, searching stops once at least ``t`` matches found so far are
    at least as long as that segment: any match inside it (or later,
    shorter segments) could not displace the current top ``t``.
    ``mem_finder`` is called once per searched segment and returns match
    objects with ``start``/``end``; all matches found before the stop are
    returned.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    lengths = [seg.end - seg.start for seg in segments]
    if any(a < b for a, b in zip(lengths, lengths[1:])):
        raise ValueError("segments must be sorted by non-increasing length")
    found: list = []
    for seg, seg_len in zip(segments, lengths):
        at_least = sum(1 for mm in found if (mm.end - mm.start) >= seg_len)
        if at_least >= t:
            break
        found.extend(mem_finder(seg))
    return found
