"""Sequence input and segment output.

Reads FASTA and FASTQ, plain or gzipped, detecting both the compression
(magic bytes) and the format (first record character) from the content
rather than the file name.  Writes segments as FASTA records whose
headers carry the read id and the half-open coordinate span, which the
coordinate fixer later inverts.
"""

from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass
from typing import Iterator, List, TextIO

GZIP_MAGIC = b"\x1f\x8b"


class ParseError(ValueError):
    """Malformed sequence input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class SeqRecord:
    id: str
    seq: str


def _open_text(source) -> tuple[TextIO, bool]:
    # Returns (text stream, whether we own it and must close it).
    if isinstance(source, (str, os.PathLike)):
        raw = open(source, "rb")
        own = True
    elif isinstance(source, io.TextIOBase):
        return source, False
    else:
        raw = source
        own = False
    buf = raw if hasattr(raw, "peek") else io.BufferedReader(raw)
    if buf.peek(2)[:2] == GZIP_MAGIC:
        stream = io.TextIOWrapper(gzip.GzipFile(fileobj=buf), encoding="utf-8",
                                  errors="replace")
    else:
        stream = io.TextIOWrapper(buf, encoding="utf-8", errors="replace")
    return stream, own


def read_records(source) -> Iterator[SeqRecord]:
    """Yield SeqRecords from FASTA or FASTQ input.

    ``source`` is a path or an open file object.  gzip input is detected
    by magic bytes, the record format by the first non-blank character:
    '>' for FASTA, '@' for FASTQ.  Record ids are the first whitespace
    token of the header.  Malformed input raises ParseError with the
    offending line number.
    """
    stream, own = _open_text(source)
    try:
        yield from _parse(stream)
    finally:
        if own:
            stream.close()


def _parse(stream: TextIO) -> Iterator[SeqRecord]:
    lineno = 0
    first = None
    for line in stream:
        lineno += 1
        if line.strip():
            first = line
            break
    if first is None:
        return
    if first.startswith(">"):
        yield from _parse_fasta(stream, first, lineno)
    elif first.startswith("@"):
        yield from _parse_fastq(stream, first, lineno)
    else:
        raise ParseError("input is neither FASTA ('>') nor FASTQ ('@')", lineno)


def _header_id(header: str, lineno: int, kind: str) -> str:
    tokens = header[1:].split()
    if not tokens:
        raise ParseError(f"{kind} header has no identifier", lineno)
    return tokens[0]


def _parse_fasta(stream: TextIO, header: str, lineno: int) -> Iterator[SeqRecord]:
    rid = _header_id(header, lineno, "FASTA")
    chunks: List[str] = []
    for line in stream:
        lineno += 1
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(">"):
            yield SeqRecord(rid, "".join(chunks))
            rid = _header_id(stripped, lineno, "FASTA")
            chunks = []
        else:
            chunks.append(stripped)
    yield SeqRecord(rid, "".join(chunks))


def _parse_fastq(stream: TextIO, first: str, lineno: int) -> Iterator[SeqRecord]:
    header = first.strip()
    header_line = lineno
    while True:
        if not header.startswith("@"):
            raise ParseError("FASTQ header must start with '@'", header_line)
        rid = _header_id(header, header_line, "FASTQ")
        try:
            seq = next(stream).strip()
            lineno += 1
            plus = next(stream).strip()
            lineno += 1
            qual = next(stream).strip()
            lineno += 1
        except StopIteration:
            raise ParseError("truncated FASTQ record", lineno + 1) from None
        if not plus.startswith("+"):
            raise ParseError("expected '+' separator line", lineno - 1)
        if len(qual) != len(seq):
            raise ParseError(
                f"quality length {len(qual)} differs from sequence length {len(seq)}",
                lineno)
        yield SeqRecord(rid, seq)
        header = ""
        for line in stream:
            lineno += 1
            if line.strip():
                header = line.strip()
                header_line = lineno
                break
        if not header:
            return


def format_header(read_id: str, start: int, end: int) -> str:
    """Segment name carrying its origin: READID:START-END, half-open."""
    return f"{read_id}:{start}-{end}"


def parse_header(token: str) -> tuple[str, int, int]:
    """Invert ``format_header``.

    Splits from the right, so ':' or '-' inside the read id survive.
    The span must be two plain decimal integers with start <= end.
    """
    rid, sep, span = token.rpartition(":")
    if not sep or not rid:
        raise ValueError(f"no read id and span in {token!r}")
    s, sep2, e = span.rpartition("-")
    if not sep2 or not s.isdigit() or not e.isdigit():
        raise ValueError(f"span is not START-END in {token!r}")
    start, end = int(s), int(e)
    if end < start:
        raise ValueError(f"span ends before it starts in {token!r}")
    return rid, start, end


def write_pseudomems(out: TextIO, read_id: str, segments, read_seq: str) -> None:
    """Write one FASTA record per segment: '>READID:START-END' plus the
    read substring the span covers."""
    for pm in segments:
        out.write(f">{format_header(read_id, pm.start, pm.end)}\n")
        out.write(read_seq[pm.start:pm.end])
        out.write("\n")
