"""Break reads into match-bearing segments with a k-mer membership filter.

Pipeline: ``build`` a filter over the reference's canonical k-mers,
``scan`` query reads into segments guaranteed to contain every maximal
exact match above the length cutoff, hand the segments to any exact
matcher, then ``fix`` its report back to whole-read coordinates.
"""

from .bloom import BloomFilter, FilterFormatError, fp_rate, optimal_size, round_pow2, size_given_h
from .cardinality import CardinalityEstimator
from .coord_fix import CoordinateOverflowError, FixStats, fix_record, fix_stream
from .kmer_hash import BASE_SEEDS, KmerHasher, canonical_hashes, reverse_complement, stream_canonical
from .oracle import ExactKmerFilter, Mem, brute_mems, early_stop_select, maximal_segments
from .scanner import PseudoMem, containment_check, scan_read, sort_and_truncate
from .seq_io import ParseError, SeqRecord, format_header, parse_header, read_records, write_pseudomems

__version__ = "0.1.0"

__all__ = [
    "BASE_SEEDS",
    "BloomFilter",
    "CardinalityEstimator",
    "CoordinateOverflowError",
    "ExactKmerFilter",
    "FilterFormatError",
    "FixStats",
    "KmerHasher",
    "Mem",
    "ParseError",
    "PseudoMem",
    "SeqRecord",
    "brute_mems",
    "canonical_hashes",
    "containment_check",
    "early_stop_select",
    "fix_record",
    "fix_stream",
    "format_header",
    "fp_rate",
    "maximal_segments",
    "optimal_size",
    "parse_header",
    "read_records",
    "reverse_complement",
    "round_pow2",
    "scan_read",
    "size_given_h",
    "sort_and_truncate",
    "stream_canonical",
    "write_pseudomems",
]
