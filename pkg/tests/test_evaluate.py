import numpy as np

from kmerbreak.evaluate import (METRIC_COLUMNS, EvalConfig, mutate_read,
                                random_reference, render_figures, run_eval,
                                write_metrics)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def small_config(**overrides):
    base = dict(seed=7, text_size=3000, num_reads=10, read_len=200,
                mutation_rate=0.12, k=12, eps=0.1, hashes=1,
                min_lens=(25, 40), tops=(3, 10), fp_probes=20_000)
    base.update(overrides)
    return EvalConfig(**base)


def test_random_reference_is_seeded_acgt():
    rng = np.random.default_rng(3)
    ref = random_reference(rng, 500)
    assert len(ref) == 500
    assert set(ref) <= set("ACGT")
    again = random_reference(np.random.default_rng(3), 500)
    assert ref == again


def test_mutate_read_rate_zero_is_identity():
    rng = np.random.default_rng(4)
    seq = random_reference(rng, 300)
    assert mutate_read(rng, seq, 0.0) == seq


def test_mutate_read_changes_and_keeps_alphabet():
    rng = np.random.default_rng(5)
    seq = random_reference(rng, 400)
    mut = mutate_read(rng, seq, 0.2)
    assert mut != seq
    assert set(mut) <= set("ACGT")
    # indels shift length a little but not wildly
    assert abs(len(mut) - len(seq)) < len(seq) // 2


def test_run_eval_rows_complete_and_consistent():
    rows = run_eval(small_config())
    assert len(rows) == 4  # two min_lens x two tops
    for row in rows:
        assert set(row) == set(METRIC_COLUMNS)
        assert row["top_bases"] <= row["segment_bases"]
        assert row["top_segments"] <= row["segments"]
        assert 0.0 <= row["coverage"] <= 1.0
        assert row["containment_rate"] == 1.0
        assert row["filter_hashes"] == 1
        assert row["fp_predicted"] > 0.0
    by_pair = {(r["min_len"], r["top"]): r for r in rows}
    assert by_pair[(25, 3)]["segment_bases"] == by_pair[(25, 10)]["segment_bases"]
    # larger cutoff cannot increase segment bases
    assert (by_pair[(40, 3)]["segment_bases"]
            <= by_pair[(25, 3)]["segment_bases"])


def test_run_eval_deterministic():
    assert run_eval(small_config()) == run_eval(small_config())


def test_measured_fp_near_predicted():
    rows = run_eval(small_config())
    predicted = rows[0]["fp_predicted"]
    measured = rows[0]["fp_measured"]
    assert predicted / 2 <= measured <= predicted * 2


def test_write_metrics_and_figures(tmp_path):
    rows = run_eval(small_config())
    table = tmp_path / "metrics.tsv"
    write_metrics(rows, table)
    lines = table.read_text().splitlines()
    assert lines[0].split("\t") == list(METRIC_COLUMNS)
    assert len(lines) == 1 + len(rows)
    paths = render_figures(rows, tmp_path)
    assert sorted(p.name for p in paths) == ["coverage.png", "searched_bases.png"]
    for p in paths:
        assert p.read_bytes()[:8] == PNG_MAGIC
