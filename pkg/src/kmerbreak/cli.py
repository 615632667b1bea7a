"""Command-line entry points.

Four subcommands: ``build`` indexes reference sequences into a filter
file, ``scan`` breaks query reads into filter-positive segments,
``fix`` rewrites a downstream match report back to whole-read
coordinates, and ``eval`` runs the synthetic measurement scenario.

Exit codes: 0 success, 2 usage errors, 3 missing or unreadable files,
4 malformed file content.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import evaluate
from .bloom import (LOG2M_MAX, LOG2M_MIN, BloomFilter, FilterFormatError,
                    fp_rate, optimal_size, round_pow2, size_given_h)
from .cardinality import CardinalityEstimator
from .coord_fix import CoordinateOverflowError, fix_stream
from .kmer_hash import canonical_hashes
from .scanner import scan_read, sort_and_truncate
from .seq_io import ParseError, read_records, write_pseudomems

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4

log = logging.getLogger("kmerbreak")


def _records(paths):
    for path in paths:
        yield from read_records(path)


def _mapper(threads: int):
    if threads > 1:
        ex = ThreadPoolExecutor(max_workers=threads)
        return ex, ex.map
    return None, map


def _cmd_build(args) -> int:
    if not 0.0 < args.fp_rate < 1.0:
        raise ValueError("-e must be strictly between 0 and 1")
    if args.kmer < 4 or args.kmer > 31:
        raise ValueError("-k must be in [4, 31]")

    def hash_one(rec):
        canon, valid = canonical_hashes(rec.seq, args.kmer)
        return canon[valid]

    est = CardinalityEstimator()
    ex, mapper = _mapper(args.threads)
    try:
        for arr in mapper(hash_one, _records(args.texts)):
            est.observe_batch(arr)
    finally:
        if ex:
            ex.shutdown()
    n_hat = max(1, round(est.estimate()))

    if args.hashes is not None:
        if args.hashes < 1:
            raise ValueError("-f must be at least 1")
        h = args.hashes
        m_raw = size_given_h(n_hat, args.fp_rate, h)
    else:
        m_raw, h = optimal_size(n_hat, args.fp_rate)
    log2m = min(max(round_pow2(max(m_raw, 2)), LOG2M_MIN), LOG2M_MAX)

    filt = BloomFilter(log2m, h, args.kmer)
    ex, mapper = _mapper(args.threads)
    try:
        for arr in mapper(hash_one, _records(args.texts)):
            filt.insert_batch(arr)
    finally:
        if ex:
            ex.shutdown()

    filt.save(args.output)
    log.info("estimated %d distinct %d-mers", n_hat, args.kmer)
    log.info("filter: m=2^%d bits, h=%d, predicted false-positive rate %.4g",
             log2m, h, fp_rate(n_hat, filt.m, h))
    log.info("wrote %s (%d bytes)", args.output, len(filt.to_bytes()))
    return EXIT_OK


def _cmd_scan(args) -> int:
    filt = BloomFilter.load(args.filter)
    if args.min_len <= filt.k:
        raise ValueError(
            f"-l must exceed the filter's k: got -l {args.min_len} with "
            f"k={filt.k} (a segment must be longer than one k-mer)")
    if args.top is not None and args.top < 0:
        raise ValueError("--top must be non-negative")

    def scan_one(rec):
        return rec, scan_read(rec.seq, filt, args.min_len, seq_id=rec.id)

    out = sys.stdout if args.output == "-" else open(args.output, "w")
    ex, mapper = _mapper(args.threads)
    total = 0
    nreads = 0
    try:
        for rec, pms in mapper(scan_one, _records(args.patterns)):
            if args.sort or args.top is not None:
                pms = sort_and_truncate(pms, args.top)
            write_pseudomems(out, rec.id, pms, rec.seq)
            total += len(pms)
            nreads += 1
    finally:
        if ex:
            ex.shutdown()
        if out is not sys.stdout:
            out.close()
    log.info("scanned %d reads, wrote %d segments", nreads, total)
    return EXIT_OK


def _cmd_fix(args) -> int:
    for col_name in ("name_col", "start_col", "length_col"):
        if getattr(args, col_name) < 1:
            raise ValueError("column numbers are 1-based")
    infile = sys.stdin if args.input == "-" else open(args.input)
    outfile = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        stats = fix_stream(infile, outfile,
                           name_col=args.name_col - 1,
                           start_col=args.start_col - 1,
                           length_col=args.length_col - 1,
                           dedup=not args.keep_duplicates)
    finally:
        if infile is not sys.stdin:
            infile.close()
        if outfile is not sys.stdout:
            outfile.close()
    log.info("fixed %d records (%d passed through, %d duplicates dropped)",
             stats.records, stats.passed_through, stats.duplicates)
    return EXIT_OK


def _cmd_eval(args) -> int:
    cfg = evaluate.EvalConfig(
        seed=args.seed,
        text_size=args.text_size,
        num_reads=args.reads,
        read_len=args.read_length,
        mutation_rate=args.mutation_rate,
        k=args.kmer,
        eps=args.fp_rate,
        hashes=args.hashes,
        min_lens=tuple(args.min_len),
        tops=tuple(args.top),
    )
    rows = evaluate.run_eval(cfg)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    table = outdir / "metrics.tsv"
    evaluate.write_metrics(rows, table)
    written = [table]
    if not args.no_figures:
        written += evaluate.render_figures(rows, outdir)
    with open(table) as fh:
        sys.stdout.write(fh.read())
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmerbreak",
        description="Break reads into match-bearing segments with a k-mer filter.")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index reference k-mers into a filter file")
    p.add_argument("texts", nargs="+", help="reference FASTA/FASTQ files (gzip ok)")
    p.add_argument("-k", "--kmer", type=int, required=True,
                   help="k-mer length (4..31)")
    p.add_argument("-e", "--fp-rate", type=float, default=0.1,
                   help="target false-positive rate (default 0.1)")
    p.add_argument("-f", "--hashes", type=int, default=None,
                   help="fix the number of hash functions (default: optimal)")
    p.add_argument("-t", "--threads", type=int, default=1,
                   help="hashing threads (default 1)")
    p.add_argument("-o", "--output", required=True, help="filter file to write")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("scan", help="break reads into filter-positive segments")
    p.add_argument("patterns", nargs="+", help="query FASTA/FASTQ files (gzip ok)")
    p.add_argument("-i", "--filter", required=True, help="filter file from build")
    p.add_argument("-l", "--min-len", type=int, required=True,
                   help="minimum segment length; must exceed the filter's k")
    p.add_argument("-s", "--sort", action="store_true",
                   help="order each read's segments longest first")
    p.add_argument("--top", type=int, default=None,
                   help="keep only the longest N segments per read (implies -s)")
    p.add_argument("-t", "--threads", type=int, default=1,
                   help="scanning threads (default 1)")
    p.add_argument("-o", "--output", default="-",
                   help="segment FASTA output (default stdout)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("fix", help="rewrite a match report to read coordinates")
    p.add_argument("-i", "--input", default="-",
                   help="tab-separated match report (default stdin)")
    p.add_argument("-o", "--output", default="-",
                   help="fixed report (default stdout)")
    p.add_argument("--name-col", type=int, default=1,
                   help="1-based column holding READID:START-END (default 1)")
    p.add_argument("--start-col", type=int, default=2,
                   help="1-based column holding the match start (default 2)")
    p.add_argument("--length-col", type=int, default=3,
                   help="1-based column holding the match length (default 3)")
    p.add_argument("--keep-duplicates", action="store_true",
                   help="do not drop records repeated across segments")
    p.set_defaults(func=_cmd_fix)

    p = sub.add_parser("eval", help="run the synthetic measurement scenario")
    p.add_argument("-o", "--output", required=True,
                   help="directory for metrics.tsv and figures")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--text-size", type=int, default=20_000)
    p.add_argument("--reads", type=int, default=50)
    p.add_argument("--read-length", type=int, default=500)
    p.add_argument("--mutation-rate", type=float, default=0.15)
    p.add_argument("-k", "--kmer", type=int, default=20)
    p.add_argument("-e", "--fp-rate", type=float, default=0.1)
    p.add_argument("-f", "--hashes", type=int, default=1)
    p.add_argument("-l", "--min-len", type=int, nargs="+", default=[40, 60, 80])
    p.add_argument("--top", type=int, nargs="+", default=[10])
    p.add_argument("--no-figures", action="store_true",
                   help="write only the metrics table")
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    try:
        return args.func(args)
    except (ParseError, FilterFormatError, CoordinateOverflowError) as exc:
        log.error("%s", exc)
        return EXIT_FORMAT
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
