import gzip
import io
import string

import numpy as np
import pytest

from kmerbreak.scanner import PseudoMem
from kmerbreak.seq_io import (ParseError, SeqRecord, format_header,
                              parse_header, read_records, write_pseudomems)


def records_from(text: str):
    return list(read_records(io.StringIO(text)))


def test_fasta_single_record():
    assert records_from(">r1\nACGT\n") == [SeqRecord("r1", "ACGT")]


def test_fasta_multiline_and_multiple_records():
    text = ">a desc ignored\nACGT\nTTGG\n\n>b\nCCC\n"
    assert records_from(text) == [SeqRecord("a", "ACGTTTGG"), SeqRecord("b", "CCC")]


def test_fasta_leading_blank_lines_and_no_trailing_newline():
    assert records_from("\n\n>x\nAC\nGT") == [SeqRecord("x", "ACGT")]


def test_fasta_empty_sequence_allowed():
    assert records_from(">a\n>b\nAC\n") == [SeqRecord("a", ""), SeqRecord("b", "AC")]


def test_fastq_records():
    text = "@r1 extra\nACGT\n+\nIIII\n@r2\nGG\n+r2\nII\n"
    assert records_from(text) == [SeqRecord("r1", "ACGT"), SeqRecord("r2", "GG")]


def test_fastq_quality_may_start_with_at_or_plus():
    text = "@r1\nACGT\n+\n@+II\n"
    assert records_from(text) == [SeqRecord("r1", "ACGT")]


def test_empty_input_gives_no_records():
    assert records_from("") == []
    assert records_from("\n\n\n") == []


def test_format_detected_from_first_character():
    with pytest.raises(ParseError) as err:
        records_from("ACGT\n")
    assert err.value.line == 1


def test_fasta_header_without_id_rejected():
    with pytest.raises(ParseError) as err:
        records_from(">\nACGT\n")
    assert err.value.line == 1
    with pytest.raises(ParseError) as err:
        records_from(">ok\nAC\n>  \nGG\n")
    assert err.value.line == 3


def test_fastq_truncated_record_rejected():
    with pytest.raises(ParseError):
        records_from("@r1\nACGT\n+\n")


def test_fastq_bad_separator_line():
    with pytest.raises(ParseError) as err:
        records_from("@r1\nACGT\nIIII\nIIII\n")
    assert err.value.line == 3


def test_fastq_quality_length_mismatch():
    with pytest.raises(ParseError) as err:
        records_from("@r1\nACGT\n+\nIII\n")
    assert err.value.line == 4


def test_gzip_input_detected(tmp_path):
    plain = tmp_path / "reads.fa"
    plain.write_text(">r\nACGTACGT\n")
    packed = tmp_path / "reads.fa.gz"
    packed.write_bytes(gzip.compress(b"@q\nTTTT\n+\nIIII\n"))
    assert list(read_records(plain)) == [SeqRecord("r", "ACGTACGT")]
    assert list(read_records(packed)) == [SeqRecord("q", "TTTT")]


def test_reading_from_binary_handle(tmp_path):
    path = tmp_path / "reads.fa"
    path.write_text(">r\nAC\n")
    with open(path, "rb") as fh:
        assert list(read_records(fh)) == [SeqRecord("r", "AC")]


def test_header_round_trip_random():
    rng = np.random.default_rng(61)
    alphabet = string.ascii_letters + string.digits + ":-_.|/"
    for _ in range(10_000):
        rid = "".join(alphabet[i]
                      for i in rng.integers(0, len(alphabet),
                                            int(rng.integers(1, 12))))
        start = int(rng.integers(0, 10**6))
        end = start + int(rng.integers(0, 10**6))
        token = format_header(rid, start, end)
        assert parse_header(token) == (rid, start, end)


def test_parse_header_keeps_separators_inside_id():
    assert parse_header("chr1:old-name:100-250") == ("chr1:old-name", 100, 250)
    assert parse_header("a-b:0-0") == ("a-b", 0, 0)


def test_parse_header_rejects_garbage():
    for bad in ("", "nospan", "r:5", "r:a-b", "r:9-5", ":5-9", "r:-5-9", "r:5-"):
        with pytest.raises(ValueError):
            parse_header(bad)


def test_write_pseudomems_format():
    out = io.StringIO()
    read = "ACGTACGTACGT"
    pms = [PseudoMem("r7", 0, 5), PseudoMem("r7", 4, 12)]
    write_pseudomems(out, "r7", pms, read)
    assert out.getvalue() == ">r7:0-5\nACGTA\n>r7:4-12\nACGTACGT\n"


def test_write_pseudomems_nothing_for_no_segments():
    out = io.StringIO()
    write_pseudomems(out, "r", [], "ACGT")
    assert out.getvalue() == ""


def test_written_segments_parse_back(tmp_path):
    read = "ACGTACGTGGCC"
    pms = [PseudoMem("r", 1, 7), PseudoMem("r", 5, 12)]
    path = tmp_path / "pms.fa"
    with open(path, "w") as fh:
        write_pseudomems(fh, "r", pms, read)
    back = list(read_records(path))
    assert len(back) == 2
    for rec, pm in zip(back, pms):
        rid, start, end = parse_header(rec.id)
        assert (rid, start, end) == ("r", pm.start, pm.end)
        assert rec.seq == read[start:end]
        assert len(rec.seq) == end - start
