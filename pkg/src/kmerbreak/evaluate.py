"""Synthetic end-to-end measurement harness.

Generates a random reference and reads sampled from it with
substitutions and indels, builds a filter over the reference, scans the
reads, and measures what the filtration achieved: how many bases a
downstream match finder would search with and without it, how much of
each read survived, whether every true match stayed inside a reported
segment, and how the filter's observed false-positive rate compares to
the prediction.  Results go to a tab-separated table and a pair of
figures.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from . import oracle, scanner
from .bloom import LOG2M_MAX, LOG2M_MIN, BloomFilter, fp_rate, round_pow2, size_given_h
from .cardinality import CardinalityEstimator
from .kmer_hash import _rotation_tables, canonical_hashes

_BASE_BYTES = np.frombuffer(b"ACGT", dtype=np.uint8)

METRIC_COLUMNS = (
    "min_len", "top", "reads", "read_bases", "segments", "segment_bases",
    "coverage", "top_segments", "top_bases", "containment_rate",
    "distinct_kmers", "filter_bits", "filter_hashes", "fp_predicted",
    "fp_measured",
)


@dataclass
class EvalConfig:
    """Knobs of one synthetic run; defaults form the packaged scenario."""
    seed: int = 0
    text_size: int = 20_000
    num_reads: int = 50
    read_len: int = 500
    mutation_rate: float = 0.15
    k: int = 20
    eps: float = 0.1
    hashes: int = 1
    min_lens: Sequence[int] = (40, 60, 80)
    tops: Sequence[int] = (10,)
    fp_probes: int = 50_000


def random_reference(rng: np.random.Generator, size: int) -> str:
    """Uniform random ACGT string of the given length."""
    codes = rng.integers(0, 4, size=size)
    return _BASE_BYTES[codes].tobytes().decode("ascii")


def mutate_read(rng: np.random.Generator, seq: str, rate: float) -> str:
    """Copy of ``seq`` with point mutations at the given per-base rate.

    Each mutated position becomes a substitution (to a different base)
    with probability 0.6, an insertion after it with 0.2, or a deletion
    with 0.2, roughly the error mix of a noisy long read.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("mutation rate must be in [0, 1]")
    out: List[str] = []
    for ch in seq:
        if rng.random() >= rate:
            out.append(ch)
            continue
        kind = rng.random()
        if kind < 0.6:
            out.append("ACGT"[(("ACGT".index(ch) if ch in "ACGT" else 0)
                               + int(rng.integers(1, 4))) % 4])
        elif kind < 0.8:
            out.append(ch)
            out.append("ACGT"[int(rng.integers(0, 4))])
        # else: deletion, emit nothing
    return "".join(out)


def _fresh_kmer_hashes(rng: np.random.Generator, n: int, k: int,
                       base_seeds) -> np.ndarray:
    # Canonical hashes of n independent random k-mers, via the same
    # rotation tables the scanning path uses.
    codes = rng.integers(0, 4, size=(n, k)).astype(np.uint8)
    ftab, rtab = _rotation_tables(tuple(int(s) for s in base_seeds))
    fwd = np.zeros(n, dtype=np.uint64)
    rc = np.zeros(n, dtype=np.uint64)
    for j in range(k):
        col = codes[:, j]
        fwd ^= ftab[(k - 1 - j) % 64][col]
        rc ^= rtab[j % 64][col]
    return np.minimum(fwd, rc)


def measure_fp(rng: np.random.Generator, filt: BloomFilter,
               exact: oracle.ExactKmerFilter, probes: int) -> float:
    """Observed false-positive rate on random k-mers absent from the text."""
    canon = _fresh_kmer_hashes(rng, probes, filt.k, filt.base_seeds)
    fresh = canon[~exact.query_batch(canon)]
    if fresh.size == 0:
        return 0.0
    return float(filt.query_batch(fresh).mean())


def _covered_bases(segments) -> int:
    # Segments may overlap by up to k-2; count union, not sum.
    total = 0
    prev_end = -1
    for pm in sorted(segments, key=lambda p: p.start):
        start = max(pm.start, prev_end)
        if pm.end > start:
            total += pm.end - start
        prev_end = max(prev_end, pm.end)
    return total


def run_eval(cfg: EvalConfig) -> List[dict]:
    """Run the synthetic scenario; one metrics row per (min_len, top) pair."""
    rng = np.random.default_rng(cfg.seed)
    text = random_reference(rng, cfg.text_size)
    reads = []
    for _ in range(cfg.num_reads):
        start = int(rng.integers(0, cfg.text_size - cfg.read_len + 1))
        reads.append(mutate_read(rng, text[start:start + cfg.read_len],
                                 cfg.mutation_rate))

    canon, valid = canonical_hashes(text, cfg.k)
    text_hashes = canon[valid]
    est = CardinalityEstimator()
    est.observe_batch(text_hashes)
    n_hat = max(1, round(est.estimate()))
    m_raw = size_given_h(n_hat, cfg.eps, cfg.hashes)
    log2m = min(max(round_pow2(max(m_raw, 2)), LOG2M_MIN), LOG2M_MAX)
    filt = BloomFilter(log2m, cfg.hashes, cfg.k)
    filt.insert_batch(text_hashes)

    exact = oracle.ExactKmerFilter(text, cfg.k)
    predicted = fp_rate(len(exact), filt.m, filt.h)
    measured = measure_fp(rng, filt, exact, cfg.fp_probes)

    read_bases = sum(len(r) for r in reads)
    rows: List[dict] = []
    for min_len in cfg.min_lens:
        per_read = [scanner.scan_read(r, filt, min_len) for r in reads]
        seg_count = sum(len(p) for p in per_read)
        seg_bases = sum(pm.length for p in per_read for pm in p)
        covered = sum(_covered_bases(p) for p in per_read)
        contained = sum(
            scanner.containment_check(r, text, filt, cfg.k, min_len)
            for r in reads)
        for top in cfg.tops:
            kept = [scanner.sort_and_truncate(p, top) for p in per_read]
            rows.append({
                "min_len": min_len,
                "top": top,
                "reads": len(reads),
                "read_bases": read_bases,
                "segments": seg_count,
                "segment_bases": seg_bases,
                "coverage": covered / read_bases if read_bases else 0.0,
                "top_segments": sum(len(p) for p in kept),
                "top_bases": sum(pm.length for p in kept for pm in p),
                "containment_rate": contained / len(reads) if reads else 1.0,
                "distinct_kmers": len(exact),
                "filter_bits": filt.m,
                "filter_hashes": filt.h,
                "fp_predicted": predicted,
                "fp_measured": measured,
            })
    return rows


def write_metrics(rows: List[dict], path) -> None:
    """Tab-separated metrics table, one row per (min_len, top) pair."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS, delimiter="\t",
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _fmt(row[c]) for c in METRIC_COLUMNS})


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return value


def render_figures(rows: List[dict], outdir) -> List[Path]:
    """Write searched_bases.png and coverage.png next to the metrics table."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    min_lens = sorted({row["min_len"] for row in rows})
    tops = sorted({row["top"] for row in rows})
    by_len = {row["min_len"]: row for row in rows}          # any top: same segments
    by_pair = {(row["min_len"], row["top"]): row for row in rows}

    paths = []
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    read_bases = [by_len[ln]["read_bases"] for ln in min_lens]
    seg_bases = [by_len[ln]["segment_bases"] for ln in min_lens]
    ax.plot(min_lens, read_bases, marker="o", color="0.3", label="whole reads")
    ax.plot(min_lens, seg_bases, marker="s", label="all segments")
    for top in tops:
        ys = [by_pair[(ln, top)]["top_bases"] for ln in min_lens]
        ax.plot(min_lens, ys, marker="^", linestyle="--", label=f"top {top}")
    ax.set_xlabel("minimum segment length")
    ax.set_ylabel("bases handed to the match finder")
    ax.set_title("Search load with and without filtration")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "searched_bases.png"
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    ax.plot(min_lens, [by_len[ln]["coverage"] for ln in min_lens],
            marker="o", label="read coverage by segments")
    ax.plot(min_lens, [by_len[ln]["containment_rate"] for ln in min_lens],
            marker="s", label="reads with all matches contained")
    ax.set_xlabel("minimum segment length")
    ax.set_ylabel("fraction")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Segment coverage and containment")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "coverage.png"
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)
    return paths
