import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colred.fracauto import (
    FracAutoPair,
    NotEquitableError,
    NotFractionalAutomorphismError,
    check_fractional_isomorphism,
    class_ratios_hold,
    format_verdict,
    fracauto_to_partition,
    is_connected,
    is_doubly_stochastic,
    is_fractional_automorphism,
    joint_partition,
    partition_to_fracauto,
    restriction_check,
    stochastic_iso_pair,
    strongly_connected_components,
)
from colred.lpreduce import Form, LinearProgram
from colred.lpsolve import Status, solve
from colred.matcore import DomainError, Partition, SparseMatrix, Vector, direct_sum, identity
from colred.refine import coarsest_equitable
from fixtures_data import TWO_REGULAR, SPLIT_A, SPLIT_B, dense
from oracles import cyclic_matrix, random_matrix, reachability_classes, structured_matrix


def test_block_constant_pair_of_equitable_partition():
    a = dense([[1, 1], [1, 1]])
    pair = partition_to_fracauto(a, Partition.trivial(a.rows), Partition.trivial(a.cols))
    assert pair.X.to_dense() == [[F(1, 2)] * 2] * 2
    assert is_fractional_automorphism(a, pair)


def test_identity_pair_of_discrete_partition():
    a = dense([[1, 0], [0, 2]])
    pair = partition_to_fracauto(a, Partition.discrete(a.rows), Partition.discrete(a.cols))
    assert pair.X == identity(a.rows)
    assert fracauto_to_partition(a, pair) == (Partition.discrete(a.rows), Partition.discrete(a.cols))


def test_non_equitable_partition_is_rejected():
    a = dense([[1, 0], [1, 1]])
    with pytest.raises(NotEquitableError) as info:
        partition_to_fracauto(a, Partition.trivial(a.rows), Partition.trivial(a.cols))
    assert info.value.witness.side == "row"


def test_non_automorphism_is_rejected():
    a = dense([[1, 0], [0, 2]])
    half = SparseMatrix.from_dense([[F(1, 2)] * 2] * 2)
    pair = FracAutoPair.from_matrices(half, half)
    assert is_doubly_stochastic(half)
    assert not is_fractional_automorphism(a, pair)
    with pytest.raises(NotFractionalAutomorphismError):
        fracauto_to_partition(a, pair)


def _shift(labels, k):
    """Permutation matrix of the cyclic shift g -> g + 1 on labels ``<p><g>_<i>``."""
    def move(label):
        head, i = label.split("_")
        return f"{head[0]}{(int(head[1:]) + 1) % k}_{i}"

    return SparseMatrix(labels, labels, {(x, move(x)): 1 for x in labels})


def test_averaged_cyclic_automorphism_gives_orbit_partition():
    rng = random.Random(3)
    for _ in range(20):
        k = rng.randint(2, 5)
        a = cyclic_matrix(rng, k, 2, 2)
        px, py = _shift(a.rows, k), _shift(a.cols, k)
        half = F(1, 2)
        x = SparseMatrix(a.rows, a.rows, {**{(r, r): half for r in a.rows}, **{k_: half for k_, _ in px.items()}})
        y = SparseMatrix(a.cols, a.cols, {**{(c, c): half for c in a.cols}, **{k_: half for k_, _ in py.items()}})
        pair = FracAutoPair.from_matrices(x, y)
        assert is_fractional_automorphism(a, pair)
        rows, cols = fracauto_to_partition(a, pair)
        assert len(rows) == 2 and len(cols) == 2
        assert is_fractional_automorphism(a, partition_to_fracauto(a, rows, cols))


def test_scc_matches_reachability_oracle():
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randint(1, 9)
        labels = [f"n{i}" for i in range(n)]
        entries = {(u, v): 1 for u in labels for v in labels if rng.random() < 0.2}
        m = SparseMatrix(labels, labels, entries)
        got = strongly_connected_components(m)
        assert set(map(frozenset, got.classes)) == reachability_classes(m)


def test_scc_on_long_path_is_iterative():
    labels = [f"n{i}" for i in range(5000)]
    m = SparseMatrix(labels, labels, {(labels[i], labels[i + 1]): 1 for i in range(4999)})
    assert strongly_connected_components(m).is_discrete()
    cyc = SparseMatrix(labels, labels, {**dict(m.items()), (labels[-1], labels[0]): 1})
    assert strongly_connected_components(cyc).is_trivial()


def test_scc_rejects_non_square():
    with pytest.raises(DomainError):
        strongly_connected_components(dense([[1, 1]]))


@pytest.mark.parametrize("i, j", list(itertools.combinations_with_replacement(range(5), 2)))
def test_two_regular_matrices_are_fractionally_isomorphic(i, j):
    a1, a2 = dense(TWO_REGULAR[i]), dense(TWO_REGULAR[j])
    verdict = check_fractional_isomorphism(a1, a2)
    assert verdict.isomorphic
    # the witness is the all-equal pair on each side of the direct sum
    assert len(verdict.joint.rows) == 1 and len(verdict.joint.cols) == 1
    assert is_fractional_automorphism(verdict.direct_sum, verdict.witness)
    assert len(set(verdict.witness.X.entries().values())) == 1
    assert restriction_check(a1, a2)


def test_two_regular_stochastic_pairs_for_connected_members():
    connected = [k for k in range(5) if is_connected(dense(TWO_REGULAR[k]))]
    assert connected == [0, 1, 2, 3]
    for i, j in itertools.product(connected, repeat=2):
        a1, a2 = dense(TWO_REGULAR[i]), dense(TWO_REGULAR[j])
        _, jp = joint_partition(a1, a2)
        x, y = stochastic_iso_pair(a1, a2, jp)
        assert x.shape == (len(a2.rows), len(a1.rows))
        assert class_ratios_hold(a1, a2, jp)


def test_figure1_pair_isomorphic_but_disconnected():
    a1, a2 = dense(SPLIT_A), dense(SPLIT_B)
    verdict = check_fractional_isomorphism(a1, a2)
    assert verdict.isomorphic
    assert not is_connected(a1)
    with pytest.raises(DomainError):
        stochastic_iso_pair(a1, a2, verdict.joint)


def _stochastic_pair_lp(a1, a2):
    """Feasibility LP for doubly stochastic X, Y with X A1 = A2 Y and X^t A2 = A1 Y^t."""
    n, m = len(a1.rows), len(a1.cols)
    xs = [f"x{i}{j}" for i in range(n) for j in range(n)]
    ys = [f"y{i}{j}" for i in range(m) for j in range(m)]
    d1, d2 = a1.to_dense(), a2.to_dense()
    rows, entries, b = [], {}, {}

    def eq(name, coeffs, rhs):
        rows.append(name)
        b[name] = rhs
        for var, v in coeffs.items():
            if v:
                entries[(name, var)] = entries.get((name, var), 0) + v

    for i in range(n):
        eq(f"xr{i}", {f"x{i}{j}": 1 for j in range(n)}, 1)
        eq(f"xc{i}", {f"x{j}{i}": 1 for j in range(n)}, 1)
    for i in range(m):
        eq(f"yr{i}", {f"y{i}{j}": 1 for j in range(m)}, 1)
        eq(f"yc{i}", {f"y{j}{i}": 1 for j in range(m)}, 1)
    for i in range(n):
        for j in range(m):
            coeffs = {}
            # (X A1)_ij - (A2 Y)_ij
            for k in range(n):
                coeffs[f"x{i}{k}"] = coeffs.get(f"x{i}{k}", 0) + d1[k][j]
            for k in range(m):
                coeffs[f"y{k}{j}"] = coeffs.get(f"y{k}{j}", 0) - d2[i][k]
            eq(f"a{i}{j}", coeffs, 0)
            coeffs = {}
            # (X^t A2)_ij - (A1 Y^t)_ij
            for k in range(n):
                coeffs[f"x{k}{i}"] = coeffs.get(f"x{k}{i}", 0) + d2[k][j]
            for k in range(m):
                coeffs[f"y{j}{k}"] = coeffs.get(f"y{j}{k}", 0) - d1[i][k]
            eq(f"t{i}{j}", coeffs, 0)
    cols = xs + ys
    return LinearProgram(Form.STANDARD_MIN, SparseMatrix(rows, cols, entries), Vector(rows, b), Vector(cols))


def test_figure1_has_no_doubly_stochastic_pair():
    lp = _stochastic_pair_lp(dense(SPLIT_A), dense(SPLIT_B))
    assert solve(lp).status is Status.INFEASIBLE
    # sanity check of the encoding: a matrix and itself admit the identity pair
    assert solve(_stochastic_pair_lp(dense(SPLIT_B), dense(SPLIT_B))).status is Status.OPTIMAL


def test_non_isomorphic_diagonals():
    verdict = check_fractional_isomorphism(dense([[1, 0], [0, 2]]), dense([[1, 0], [0, 3]]))
    assert not verdict.isomorphic
    assert verdict.witness is None
    assert format_verdict(verdict).startswith("fractionally-isomorphic: no\n")


def test_direct_sums_of_isomorphic_pairs_are_isomorphic():
    a1, a2 = dense(TWO_REGULAR[1]), dense(TWO_REGULAR[2])
    a3, a4 = dense(SPLIT_A), dense(SPLIT_B)
    assert check_fractional_isomorphism(a1, a2) and check_fractional_isomorphism(a3, a4)
    s13 = direct_sum(a1, a3, force_prefix=True)
    s24 = direct_sum(a2, a4, force_prefix=True)
    assert check_fractional_isomorphism(s13, s24)


def test_format_verdict_lists_joint_classes():
    verdict = check_fractional_isomorphism(dense([[1]]), dense([[1]]))
    assert format_verdict(verdict) == "fractionally-isomorphic: yes\nrows\n1:1 2:1\ncols\n1:1 2:1\n"


def _relabelled_copy(rng, a):
    rows = [f"p{r}" for r in a.rows]
    cols = [f"q{c}" for c in a.cols]
    rng.shuffle(rows)
    rng.shuffle(cols)
    return SparseMatrix(rows, cols, {(f"p{r}", f"q{c}"): v for (r, c), v in a.items()})


def test_restriction_holds_on_random_pairs():
    rng = random.Random(21)
    for _ in range(120):
        a1 = random_matrix(rng, rng.randint(1, 10), rng.randint(1, 10), 0.4, [F(1), F(2)])
        a2 = _relabelled_copy(rng, a1) if rng.random() < 0.5 else random_matrix(rng, rng.randint(1, 10), rng.randint(1, 10), 0.4, [F(1), F(2)])
        assert restriction_check(a1, a2)


def test_isomorphic_copies_and_class_ratios():
    rng = random.Random(5)
    checked = 0
    for _ in range(100):
        a = structured_matrix(rng, 12)
        if not is_connected(a):
            continue
        b = _relabelled_copy(rng, a)
        verdict = check_fractional_isomorphism(a, b)
        assert verdict.isomorphic
        assert class_ratios_hold(a, b, verdict.joint)
        stochastic_iso_pair(a, b, verdict.joint)
        checked += 1
    assert checked >= 20


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_partition_round_trip_through_fracauto(seed):
    rng = random.Random(seed)
    a = structured_matrix(rng, 10)
    res = coarsest_equitable(a)
    pair = partition_to_fracauto(a, res.rows, res.cols)
    assert fracauto_to_partition(a, pair) == (res.rows, res.cols)
