import io
import logging

import pytest

from kmerbreak.coord_fix import (CoordinateOverflowError, fix_record,
                                 fix_stream)


def run_fix(text, **kwargs):
    out = io.StringIO()
    stats = fix_stream(io.StringIO(text), out, **kwargs)
    return out.getvalue(), stats


def test_fix_record_adds_segment_start():
    fixed = fix_record(["r7:100-250", "10", "30"])
    assert fixed == ["r7", "110", "30"]


def test_fix_record_zero_offset_identity():
    assert fix_record(["read1:0-500", "42", "7"]) == ["read1", "42", "7"]


def test_fix_record_preserves_other_fields():
    fields = ["x", "r:10-90", "5", "20", "yy", "0.5"]
    fixed = fix_record(fields, name_col=1, start_col=2, length_col=3)
    assert fixed == ["x", "r", "15", "20", "yy", "0.5"]
    assert fields[1] == "r:10-90"  # input untouched


def test_fix_record_overflow():
    with pytest.raises(CoordinateOverflowError):
        fix_record(["r:100-150", "30", "21"])
    fix_record(["r:100-150", "30", "20"])  # exactly at the end is fine


def test_fix_record_rejects_negative():
    with pytest.raises(ValueError):
        fix_record(["r:0-50", "-1", "5"])
    with pytest.raises(ValueError):
        fix_record(["r:0-50", "1", "-5"])


def test_stream_happy_path():
    text = "r:100-250\t10\t30\textra\nr:300-400\t0\t50\n"
    out, stats = run_fix(text)
    assert out == "r\t110\t30\textra\nr\t300\t50\n"
    assert stats.records == 2
    assert stats.passed_through == 0
    assert stats.duplicates == 0


def test_stream_passthrough_with_warning(caplog):
    text = "not_a_segment\t5\t6\nr:10-60\t1\t2\n"
    with caplog.at_level(logging.WARNING, logger="kmerbreak.coord_fix"):
        out, stats = run_fix(text)
    assert out == "not_a_segment\t5\t6\nr\t11\t2\n"
    assert stats.passed_through == 1
    assert stats.records == 1
    assert "not_a_segment" in caplog.text


def test_stream_passthrough_short_lines_and_bad_numbers():
    text = "lonely\nr:10-60\tNaN\t2\n"
    out, stats = run_fix(text)
    assert out == text
    assert stats.passed_through == 2
    assert stats.records == 0


def test_stream_overflow_aborts_with_line_number():
    text = "r:10-60\t0\t10\nr:10-60\t45\t10\n"
    with pytest.raises(CoordinateOverflowError) as err:
        run_fix(text)
    assert "line 2" in str(err.value)


def test_stream_dedup_collapses_repeats():
    # the same match reported from two overlapping segments
    text = "r:100-200\t20\t40\nr:110-210\t10\t40\n"
    out, stats = run_fix(text)
    assert out == "r\t120\t40\n"
    assert stats.duplicates == 1
    assert stats.records == 1


def test_stream_dedup_keeps_distinct_extras():
    # same coordinates but a differing extra field is not a duplicate
    text = "r:100-200\t20\t40\tA\nr:110-210\t10\t40\tB\n"
    out, stats = run_fix(text)
    assert out == "r\t120\t40\tA\nr\t120\t40\tB\n"
    assert stats.duplicates == 0


def test_stream_keep_duplicates_flag():
    text = "r:100-200\t20\t40\nr:110-210\t10\t40\n"
    out, stats = run_fix(text, dedup=False)
    assert out == "r\t120\t40\nr\t120\t40\n"
    assert stats.duplicates == 0
    assert stats.records == 2


def test_stream_custom_columns():
    text = "score\tr:50-90\t3\t10\n"
    out, stats = run_fix(text, name_col=1, start_col=2, length_col=3)
    assert out == "score\tr\t53\t10\n"
    assert stats.records == 1


def test_stream_preserves_blank_lines():
    out, stats = run_fix("\nr:0-10\t0\t5\n\n")
    assert out == "\nr\t0\t5\n\n"
    assert stats.records == 1
