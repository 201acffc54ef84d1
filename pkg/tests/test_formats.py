from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from colred.formats import (
    ParseError,
    dump_matrix,
    dump_partition,
    format_value,
    parse_matrix,
    parse_partition,
    read_matrix,
)
from colred.matcore import INF, Partition, SparseMatrix


def test_value_formatting():
    assert format_value(F(3)) == "3"
    assert format_value(F(-2, 6)) == "-1/3"
    assert format_value(INF) == "inf"


def test_parse_matrix_with_default_labels():
    a = parse_matrix("matrix 2 2\n1 1 3\n2 2 1/2  # comment\n\n")
    assert a.to_dense() == [[3, 0], [0, F(1, 2)]]


def test_parse_matrix_with_labels_and_inf():
    a = parse_matrix("matrix 1 2\nrows v\ncols w w_inf\nv w 0.25\nv w_inf inf\n")
    assert a.rows == ("v",) and a.cols == ("w", "w_inf")
    assert a.get("v", "w") == F(1, 4)
    assert a.get("v", "w_inf") is INF


@pytest.mark.parametrize(
    "text, line",
    [
        ("matrix 2 x\n", 1),
        ("matrix 1 1\n1 1 abc\n", 2),
        ("matrix 1 1\n1 1 1\n1 1 2\n", 3),
        ("matrix 1 1\n\n2 1 1\n", 3),
        ("matrix 1 1\n1 1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_matrix(text)
    assert info.value.line == line


def test_read_matrix_reports_file(tmp_path):
    p = tmp_path / "bad.mat"
    p.write_text("matrix 1 1\n1 1 ?\n")
    with pytest.raises(ParseError) as info:
        read_matrix(p)
    assert str(p) in str(info.value) and ":2:" in str(info.value)
    assert str(info.value).count(str(p)) == 1


labels = st.text(alphabet="abcxyz0123_", min_size=1, max_size=4)
values = st.one_of(st.fractions(min_value=-9, max_value=9, max_denominator=7), st.just(INF))


@given(
    st.lists(labels, min_size=1, max_size=5, unique=True),
    st.lists(labels, min_size=1, max_size=5, unique=True),
    st.data(),
)
def test_matrix_round_trip(rows, cols, data):
    entries = {(r, c): data.draw(values) for r in rows for c in cols if data.draw(st.booleans())}
    a = SparseMatrix(rows, cols, entries)
    text = dump_matrix(a)
    b = parse_matrix(text)
    assert b == a
    assert dump_matrix(b) == text


@given(st.lists(st.integers(0, 3), min_size=1, max_size=10))
def test_partition_round_trip(keys):
    ground = [f"g{i}" for i in range(len(keys))]
    p = Partition.from_key(ground, lambda g: keys[int(g[1:])])
    assert parse_partition(dump_partition(p), ground) == p


def test_partition_must_cover_ground():
    with pytest.raises(ParseError):
        parse_partition("a b\n", ["a", "b", "c"])
