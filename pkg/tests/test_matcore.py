from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colred.matcore import (
    INF,
    CheckResult,
    DomainError,
    InfinityArithmeticError,
    Partition,
    SparseMatrix,
    Vector,
    aggregate,
    direct_sum,
    identity,
    mat_vec,
    multiply,
    partition_matrix,
    scaled_transpose,
    to_ext,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def test_inf_absorbs_addition():
    assert INF + F(3) is INF
    assert F(-7) + INF is INF
    assert INF + INF is INF
    assert sum([F(1), INF, F(2)], F(0)) is INF


def test_inf_multiplication_rules():
    assert INF * 0 == 0 and isinstance(INF * 0, F)
    assert 0 * INF == 0
    assert F(1, 3) * INF is INF
    with pytest.raises(InfinityArithmeticError):
        F(-1) * INF
    with pytest.raises(InfinityArithmeticError):
        -INF
    with pytest.raises(InfinityArithmeticError):
        INF - 1


def test_inf_orders_above_rationals():
    assert INF > F(10**9)
    assert not INF < F(0)
    assert max([F(2), INF, F(-1)]) is INF


def test_to_ext_accepts_exact_values_only():
    assert to_ext("3/4") == F(3, 4)
    assert to_ext("inf") is INF
    assert to_ext(2) == F(2)
    with pytest.raises(TypeError):
        to_ext(0.5)
    with pytest.raises(TypeError):
        to_ext(True)


def test_sparse_matrix_drops_zeros_and_orders_entries():
    a = SparseMatrix(["a", "b"], ["x", "y"], {("b", "y"): 2, ("a", "x"): 0, ("a", "y"): F(1, 2)})
    assert a.nnz == 2
    assert list(a.entries()) == [("a", "y"), ("b", "y")]
    assert a.get("a", "x") == 0
    assert a.row("b") == {"y": F(2)}


def test_sparse_matrix_rejects_unknown_labels_and_duplicates():
    with pytest.raises(DomainError):
        SparseMatrix(["a"], ["x"], {("b", "x"): 1})
    with pytest.raises(DomainError):
        SparseMatrix(["a", "a"], ["x"])


def test_dense_round_trip_and_transpose():
    data = [[1, 0, 2], [0, F(1, 3), 0]]
    a = SparseMatrix.from_dense(data)
    assert a.to_dense() == data
    assert a.transpose().to_dense() == [list(col) for col in zip(*data)]
    assert a.rows == ("1", "2") and a.cols == ("1", "2", "3")


def test_infinity_count_tracks_inf_entries():
    a = SparseMatrix.from_dense([[1, INF], [0, 2]])
    assert a.infinity_count == 1


def test_partition_is_canonical():
    p = Partition("abcd", [["d", "b"], ["c", "a"]])
    assert p.classes == (("a", "c"), ("b", "d"))
    assert p == Partition("abcd", [["b", "d"], ["a", "c"]])
    assert p.class_of("d") == 1


def test_partition_validation():
    with pytest.raises(DomainError):
        Partition("abc", [["a", "b"]])
    with pytest.raises(DomainError):
        Partition("abc", [["a", "b"], ["b", "c"]])
    with pytest.raises(DomainError):
        Partition("ab", [["a", "b"], []])


def test_partition_refines_and_restrict():
    fine = Partition("abcd", [["a"], ["b"], ["c", "d"]])
    coarse = Partition("abcd", [["a", "b"], ["c", "d"]])
    assert fine.refines(coarse) and not coarse.refines(fine)
    assert coarse.restrict("bcd") == Partition("bcd", [["b"], ["c", "d"]])


def test_partition_matrix_and_scaled_transpose():
    p = Partition("abc", [["a", "c"], ["b"]])
    pi = partition_matrix(p)
    assert pi.class_labels == ("P0", "P1")
    assert pi.matrix.to_dense() == [[1, 0], [0, 1], [1, 0]]
    assert scaled_transpose(pi).to_dense() == [[F(1, 2), 0, F(1, 2)], [0, 1, 0]]


@given(st.lists(st.integers(0, 3), min_size=1, max_size=12))
def test_scaled_transpose_is_left_inverse(keys):
    ground = [f"g{i}" for i in range(len(keys))]
    p = Partition.from_key(ground, lambda g: keys[int(g[1:])])
    pi = partition_matrix(p)
    assert multiply(scaled_transpose(pi), pi.matrix) == identity(pi.class_labels)


def _dense_product(x, y):
    return [[sum((x[i][k] * y[k][j] for k in range(len(y))), F(0)) for j in range(len(y[0]))] for i in range(len(x))]


@settings(max_examples=60)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.data())
def test_multiply_matches_dense_product(n, k, m, data):
    x = [[data.draw(rationals) for _ in range(k)] for _ in range(n)]
    y = [[data.draw(rationals) for _ in range(m)] for _ in range(k)]
    got = multiply(SparseMatrix.from_dense(x), SparseMatrix.from_dense(y))
    assert got.to_dense() == _dense_product(x, y)


def test_multiply_with_inf_uses_absorption():
    a = SparseMatrix.from_dense([[1, INF]])
    b = SparseMatrix.from_dense([[2], [0]])
    assert multiply(a, b).to_dense() == [[2]]
    c = SparseMatrix.from_dense([[2], [F(1, 2)]])
    assert multiply(a, c).get("1", "1") is INF


def test_multiply_rejects_mismatched_labels():
    with pytest.raises(DomainError):
        multiply(SparseMatrix.from_dense([[1]]), SparseMatrix(["z"], ["1"], {("z", "1"): 1}))


def test_aggregate_sums_block():
    a = SparseMatrix.from_dense([[1, 2], [3, INF]])
    assert aggregate(a, ["1"], ["1", "2"]) == 3
    assert aggregate(a, ["2"], ["1", "2"]) is INF
    assert aggregate(a, [], ["1"]) == 0


def test_direct_sum_prefixes_on_collision():
    a = SparseMatrix.from_dense([[1]])
    s = direct_sum(a, a)
    assert s.rows == ("1:1", "2:1")
    assert s.to_dense() == [[1, 0], [0, 1]]
    b = SparseMatrix(["x"], ["y"], {("x", "y"): 5})
    assert direct_sum(a, b).rows == ("1", "x")


def test_vector_and_mat_vec():
    v = Vector(["a", "b"], {"b": 2})
    assert v.to_list() == [0, 2]
    a = SparseMatrix.from_dense([[1, 1], [0, 3]], ["p", "q"], ["a", "b"])
    assert mat_vec(a, v) == Vector(["p", "q"], {"p": 2, "q": 6})
    with pytest.raises(DomainError):
        mat_vec(SparseMatrix.from_dense([[INF]], ["p"], ["a"]), Vector(["a"]))


def test_check_result_truthiness():
    assert CheckResult(True)
    assert not CheckResult(False, "why")
