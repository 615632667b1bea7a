"""Break query reads into filter-positive segments.

A segment is a maximal run of read positions whose k-mers all pass the
membership filter, widened by k-1 to cover the last window.  Because
the filter never misses an inserted k-mer, every true match of length
at least min_len lies entirely inside one reported segment; false
positives can only widen or bridge segments, never drop one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import oracle
from .kmer_hash import canonical_hashes


@dataclass(frozen=True)
class PseudoMem:
    """Candidate segment [start, end) of a read.

    Every k-mer inside passed the filter and the segment cannot be
    extended in either direction without including a failing window.
    Consecutive segments may overlap by up to k-2 positions; none is
    nested in another.
    """
    seq_id: str
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


def scan_read(read: str, filt, min_len: int, seq_id: str = "") -> List[PseudoMem]:
    """Segments of ``read`` with length >= min_len whose k-mers all pass ``filt``.

    ``filt`` needs ``k``, ``base_seeds`` and ``query_batch``; the exact
    and probabilistic filters both qualify.  Windows containing non-ACGT
    characters count as failing, so no segment crosses them.  Results
    come back in position order.
    """
    k = filt.k
    if min_len <= k:
        raise ValueError(
            f"minimum segment length must exceed the filter's k "
            f"(got min_len={min_len} with k={k})")
    canon, valid = canonical_hashes(read, k, filt.base_seeds)
    if canon.size == 0:
        return []
    positive = filt.query_batch(canon) & valid
    edges = np.diff(positive.astype(np.int8), prepend=np.int8(0),
                    append=np.int8(0))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    out: List[PseudoMem] = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        # Run of window starts [s, e) covers read positions [s, e-1+k).
        end = e - 1 + k
        if end - s >= min_len:
            out.append(PseudoMem(seq_id, int(s), int(end)))
    return out


def sort_and_truncate(segments: Sequence[PseudoMem],
                      t: Optional[int] = None) -> List[PseudoMem]:
    """Longest first, ties broken by start position; keep at most t.

    With t=None the full sorted list comes back.  The order is total, so
    the selection of the top t is deterministic.
    """
    ordered = sorted(segments, key=lambda pm: (-(pm.end - pm.start), pm.start))
    if t is None:
        return ordered
    if t < 0:
        raise ValueError("t must be non-negative")
    return ordered[:t]


def containment_check(read: str, text: str, filter_over_text, k: int,
                      min_len: int) -> bool:
    """True when every maximal exact match of ``read`` against ``text`` of
    length >= min_len lies inside some reported segment.

    This is the guarantee the scanning path must uphold for any filter
    with no false negatives over the text's k-mers; used as a direct
    end-to-end check.
    """
    if filter_over_text.k != k:
        raise ValueError("filter was built with a different k")
    segments = scan_read(read, filter_over_text, min_len)
    mems = oracle.brute_mems(read, text, min_len)
    for mm in mems:
        if not any(pm.start <= mm.start and mm.end <= pm.end for pm in segments):
            return False
    return True
