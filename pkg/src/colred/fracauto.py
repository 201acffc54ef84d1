"""Fractional automorphisms and fractional isomorphisms of matrices.

A fractional automorphism of ``A`` is a pair ``(X, Y)`` of doubly stochastic
matrices with ``X A == A Y``. Equitable partitions give block-constant pairs,
and the strongly connected components of any such pair give back an
equitable partition. Two matrices are fractionally isomorphic iff the
coarsest equitable partition of their direct sum is balanced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable

from .matcore import (
    CheckResult,
    DomainError,
    Partition,
    SparseMatrix,
    direct_sum,
    multiply,
)
from .refine import coarsest_equitable, is_equitable

__all__ = [
    "NotEquitableError",
    "NotFractionalAutomorphismError",
    "FracAutoPair",
    "JointPartition",
    "IsoVerdict",
    "block_constant",
    "is_doubly_stochastic",
    "is_fractional_automorphism",
    "partition_to_fracauto",
    "fracauto_to_partition",
    "strongly_connected_components",
    "is_connected",
    "joint_partition",
    "check_fractional_isomorphism",
    "stochastic_iso_pair",
    "restriction_check",
    "class_ratios_hold",
    "format_verdict",
]


class NotEquitableError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"partition is not equitable: {witness}")


class NotFractionalAutomorphismError(ValueError):
    pass


def block_constant(p: Partition) -> SparseMatrix:
    """The matrix with entry 1/|P| for every pair inside a class P, else 0."""
    entries = []
    for cls in p.classes:
        w = Fraction(1, len(cls))
        entries.extend(((x, y), w) for x in cls for y in cls)
    return SparseMatrix(p.ground, p.ground, entries)


@dataclass(frozen=True)
class FracAutoPair:
    """A pair of square matrices, stored either explicitly or as the
    block-constant pair of a partition (materialised on first use)."""

    rows: Partition | None = None
    cols: Partition | None = None
    explicit: tuple[SparseMatrix, SparseMatrix] | None = field(default=None, repr=False)

    @classmethod
    def from_matrices(cls, x: SparseMatrix, y: SparseMatrix) -> "FracAutoPair":
        return cls(explicit=(x, y))

    @classmethod
    def from_partitions(cls, rows: Partition, cols: Partition) -> "FracAutoPair":
        return cls(rows=rows, cols=cols)

    @cached_property
    def X(self) -> SparseMatrix:
        return self.explicit[0] if self.explicit else block_constant(self.rows)

    @cached_property
    def Y(self) -> SparseMatrix:
        return self.explicit[1] if self.explicit else block_constant(self.cols)


def is_doubly_stochastic(m: SparseMatrix) -> CheckResult:
    if len(m.rows) != len(m.cols):
        return CheckResult(False, "not square")
    for (r, c), v in m.items():
        if not isinstance(v, Fraction) or v < 0:
            return CheckResult(False, f"entry ({r}, {c}) = {v} is not a nonnegative rational")
    for r in m.rows:
        s = sum(m.row(r).values(), Fraction(0))
        if s != 1:
            return CheckResult(False, f"row {r!r} sums to {s}")
    for c in m.cols:
        s = sum(m.col(c).values(), Fraction(0))
        if s != 1:
            return CheckResult(False, f"column {c!r} sums to {s}")
    return CheckResult(True)


def _same_labels(m: SparseMatrix, labels) -> bool:
    return set(m.rows) == set(labels) and set(m.cols) == set(labels) and len(m.rows) == len(labels)


def _reorder(m: SparseMatrix, rows, cols) -> SparseMatrix:
    return SparseMatrix(rows, cols, m.items())


def is_fractional_automorphism(a: SparseMatrix, pair: FracAutoPair) -> CheckResult:
    x, y = pair.X, pair.Y
    if not _same_labels(x, a.rows) or not _same_labels(y, a.cols):
        return CheckResult(False, "X must be indexed by the rows of A and Y by its columns")
    for name, m in (("X", x), ("Y", y)):
        ds = is_doubly_stochastic(m)
        if not ds:
            return CheckResult(False, f"{name} is not doubly stochastic: {ds.witness}")
    x = _reorder(x, a.rows, a.rows)
    y = _reorder(y, a.cols, a.cols)
    xa, ay = multiply(x, a), multiply(a, y)
    if xa != ay:
        diff = next(k for k in sorted(set(xa.entries()) | set(ay.entries()), key=str) if xa.get(*k) != ay.get(*k))
        return CheckResult(False, f"XA != AY at {diff}: {xa.get(*diff)} vs {ay.get(*diff)}")
    return CheckResult(True)


def partition_to_fracauto(a: SparseMatrix, rows: Partition, cols: Partition) -> FracAutoPair:
    eq = is_equitable(a, rows, cols)
    if not eq:
        raise NotEquitableError(eq.witness)
    pair = FracAutoPair.from_partitions(rows, cols)
    check = is_fractional_automorphism(a, pair)
    if not check:
        raise AssertionError(f"block-constant pair of an equitable partition failed: {check.witness}")
    return pair


def strongly_connected_components(m: SparseMatrix) -> Partition:
    """Strongly connected components of the digraph with an arc v -> v' for every nonzero entry."""
    if not _same_labels(m, m.rows):
        raise DomainError("strongly connected components need a square matrix on one label set")
    index: dict[Hashable, int] = {}
    low: dict[Hashable, int] = {}
    on_stack: set = set()
    stack: list = []
    components: list[list] = []
    counter = 0
    for root in m.rows:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(m.row(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(m.row(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return Partition(m.rows, components)


def fracauto_to_partition(a: SparseMatrix, pair: FracAutoPair) -> tuple[Partition, Partition]:
    check = is_fractional_automorphism(a, pair)
    if not check:
        raise NotFractionalAutomorphismError(check.witness)
    rows = strongly_connected_components(_reorder(pair.X, a.rows, a.rows))
    cols = strongly_connected_components(_reorder(pair.Y, a.cols, a.cols))
    return rows, cols


def is_connected(a: SparseMatrix) -> bool:
    """Whether the bipartite graph of ``a`` (rows and columns as vertices) is connected."""
    nodes = [("r", r) for r in a.rows] + [("c", c) for c in a.cols]
    if len(nodes) <= 1:
        return True
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    components = len(nodes)
    for (r, c), _ in a.items():
        x, y = find(("r", r)), find(("c", c))
        if x != y:
            parent[x] = y
            components -= 1
    return components == 1


@dataclass(frozen=True)
class JointPartition:
    """Partition of the direct sum of two matrices.

    Labels are side-prefixed (``1:`` / ``2:``); ``original`` maps them back.
    """

    rows: Partition
    cols: Partition
    side_of: dict = field(repr=False)
    original: dict = field(repr=False)

    def is_balanced(self) -> bool:
        return all({self.side_of[x] for x in cls} == {1, 2} for part in (self.rows, self.cols) for cls in part)

    def restrict(self, side: int) -> tuple[Partition, Partition]:
        out = []
        for part in (self.rows, self.cols):
            sub = part.restrict(x for x in part.ground if self.side_of[x] == side)
            out.append(sub.relabel(self.original.__getitem__))
        return out[0], out[1]


def _prefixed_sum(a1: SparseMatrix, a2: SparseMatrix):
    s = direct_sum(a1, a2, force_prefix=True)
    side_of, original = {}, {}
    for side, m in ((1, a1), (2, a2)):
        for x in (*m.rows, *m.cols):
            side_of[f"{side}:{x}"] = side
            original[f"{side}:{x}"] = x
    return s, side_of, original


def joint_partition(a1: SparseMatrix, a2: SparseMatrix) -> tuple[SparseMatrix, JointPartition]:
    """Direct sum of ``a1`` and ``a2`` and its coarsest equitable partition."""
    s, side_of, original = _prefixed_sum(a1, a2)
    res = coarsest_equitable(s)
    return s, JointPartition(res.rows, res.cols, side_of, original)


@dataclass(frozen=True)
class IsoVerdict:
    isomorphic: bool
    joint: JointPartition
    witness: FracAutoPair | None = None
    direct_sum: SparseMatrix | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.isomorphic


def _crosses_sides(m: SparseMatrix, side_of: dict) -> bool:
    for x in m.rows:
        if not any(side_of[y] != side_of[x] for y in m.row(x)):
            return False
    return True


def check_fractional_isomorphism(a1: SparseMatrix, a2: SparseMatrix) -> IsoVerdict:
    s, jp = joint_partition(a1, a2)
    if not jp.is_balanced():
        return IsoVerdict(False, jp, None, s)
    pair = partition_to_fracauto(s, jp.rows, jp.cols)
    if not (_crosses_sides(pair.X, jp.side_of) and _crosses_sides(pair.Y, jp.side_of)):
        raise AssertionError("balanced partition produced a witness without cross-side entries")
    return IsoVerdict(True, jp, pair, s)


def stochastic_iso_pair(
    a1: SparseMatrix, a2: SparseMatrix, jp: JointPartition
) -> tuple[SparseMatrix, SparseMatrix]:
    """Stochastic ``X`` (rows of a2 x rows of a1) and ``Y`` (cols of a2 x cols of a1)
    with constant column sums, ``X a1 == a2 Y`` and ``X^t a2 == a1 Y^t``.

    Requires ``a1`` connected and ``jp`` a balanced equitable joint partition.
    """
    if not is_connected(a1):
        raise DomainError("the first matrix must be connected")
    if not jp.is_balanced():
        raise DomainError("joint partition is not balanced")
    s, _, _ = _prefixed_sum(a1, a2)
    eq = is_equitable(s, jp.rows, jp.cols)
    if not eq:
        raise NotEquitableError(eq.witness)

    def build(part: Partition, lab2, lab1) -> SparseMatrix:
        entries = []
        for cls in part.classes:
            one = [jp.original[x] for x in cls if jp.side_of[x] == 1]
            two = [jp.original[x] for x in cls if jp.side_of[x] == 2]
            w = Fraction(1, len(one))
            entries.extend(((u, v), w) for u in two for v in one)
        return SparseMatrix(lab2, lab1, entries)

    x = build(jp.rows, a2.rows, a1.rows)
    y = build(jp.cols, a2.cols, a1.cols)

    if a1.nnz and a2.nnz and Fraction(len(a1.rows), len(a2.rows)) != Fraction(len(a1.cols), len(a2.cols)):
        raise AssertionError("dimension ratios of fractionally isomorphic connected matrices must agree")
    for m, expected in ((x, Fraction(len(a2.rows), len(a1.rows))), (y, Fraction(len(a2.cols), len(a1.cols)))):
        if any(sum(m.row(r).values(), Fraction(0)) != 1 for r in m.rows):
            raise AssertionError("constructed matrix is not stochastic")
        if any(sum(m.col(c).values(), Fraction(0)) != expected for c in m.cols):
            raise AssertionError("constructed matrix does not have constant column sums")
    if multiply(x, a1) != multiply(a2, y):
        raise AssertionError("X A1 != A2 Y")
    if multiply(x.transpose(), a2) != multiply(a1, y.transpose()):
        raise AssertionError("X^t A2 != A1 Y^t")
    return x, y


def restriction_check(a1: SparseMatrix, a2: SparseMatrix) -> bool:
    """Whether the coarsest equitable joint partition restricts to each side's coarsest partition."""
    _, jp = joint_partition(a1, a2)
    for side, a in ((1, a1), (2, a2)):
        rows, cols = jp.restrict(side)
        own = coarsest_equitable(a)
        if rows != own.rows or cols != own.cols:
            return False
    return True


def class_ratios_hold(a1: SparseMatrix, a2: SparseMatrix, jp: JointPartition) -> bool:
    """For connected ``a1`` and balanced ``jp``: every class splits between the
    sides in the ratio of the matrix dimensions."""
    n1 = sum(1 for x in jp.rows.ground if jp.side_of[x] == 1)
    n2 = len(jp.rows.ground) - n1
    m1 = sum(1 for x in jp.cols.ground if jp.side_of[x] == 1)
    m2 = len(jp.cols.ground) - m1
    if 0 in (n2, m2):
        return False
    if Fraction(n1, n2) != Fraction(m1, m2):
        return False
    for part, ratio in ((jp.rows, Fraction(n1, n2)), (jp.cols, Fraction(m1, m2))):
        for cls in part:
            one = sum(1 for x in cls if jp.side_of[x] == 1)
            if one in (0, len(cls)) or Fraction(one, len(cls) - one) != ratio:
                return False
    return True


def format_verdict(verdict: IsoVerdict) -> str:
    from .formats import dump_partition

    head = f"fractionally-isomorphic: {'yes' if verdict.isomorphic else 'no'}\n"
    return head + "rows\n" + dump_partition(verdict.joint.rows) + "cols\n" + dump_partition(verdict.joint.cols)
