"""Rewrite match reports from segment-local to whole-read coordinates.

Downstream matchers see segment FASTA records named READID:START-END and
report matches with offsets local to the segment.  Fixing adds the
segment start back to each offset and restores the bare read id, leaving
every other field untouched.  Matches found twice because neighbouring
segments overlap collapse to one record.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, TextIO

from .seq_io import parse_header

log = logging.getLogger(__name__)


class CoordinateOverflowError(ValueError):
    """A match extends past the end of the segment it was reported in."""


@dataclass
class FixStats:
    records: int = 0          # rewritten records emitted
    passed_through: int = 0   # lines left untouched (name field not ours)
    duplicates: int = 0       # rewritten records dropped as exact repeats


def fix_record(fields: Sequence[str], name_col: int = 0, start_col: int = 1,
               length_col: int = 2) -> List[str]:
    """Rewrite one tab-split record to whole-read coordinates.

    The name field must parse as READID:START-END; the start field is the
    match offset local to that segment and the length field its length.
    Raises CoordinateOverflowError when offset + length overruns the
    segment, plain ValueError when the fields do not parse.
    """
    read_id, seg_start, seg_end = parse_header(fields[name_col])
    offset = int(fields[start_col])
    length = int(fields[length_col])
    if offset < 0 or length < 0:
        raise ValueError("match offset and length must be non-negative")
    if offset + length > seg_end - seg_start:
        raise CoordinateOverflowError(
            f"match at offset {offset} length {length} overruns segment "
            f"{fields[name_col]} of {seg_end - seg_start} bases")
    fixed = list(fields)
    fixed[name_col] = read_id
    fixed[start_col] = str(seg_start + offset)
    return fixed


def fix_stream(infile: TextIO, outfile: TextIO, name_col: int = 0,
               start_col: int = 1, length_col: int = 2,
               dedup: bool = True) -> FixStats:
    """Fix every record of a tab-separated match report.

    Lines whose name field does not parse pass through unchanged with a
    warning; a coordinate overrun aborts, since it means the report does
    not belong to these segments.  With ``dedup``, a rewritten record
    equal to an earlier one in all fields is dropped.
    """
    stats = FixStats()
    seen = set()
    ncols = max(name_col, start_col, length_col) + 1
    for lineno, raw in enumerate(infile, 1):
        line = raw.rstrip("\r\n")
        if not line:
            outfile.write("\n")
            continue
        fields = line.split("\t")
        if len(fields) < ncols:
            log.warning("line %d: fewer than %d tab-separated fields; passing through",
                        lineno, ncols)
            stats.passed_through += 1
            outfile.write(line + "\n")
            continue
        try:
            fixed = fix_record(fields, name_col, start_col, length_col)
        except CoordinateOverflowError as exc:
            raise CoordinateOverflowError(f"line {lineno}: {exc}") from None
        except ValueError:
            log.warning("line %d: name %r is not READID:START-END; passing through",
                        lineno, fields[name_col])
            stats.passed_through += 1
            outfile.write(line + "\n")
            continue
        out_line = "\t".join(fixed)
        if dedup:
            if out_line in seen:
                stats.duplicates += 1
                continue
            seen.add(out_line)
        stats.records += 1
        outfile.write(out_line + "\n")
    return stats
