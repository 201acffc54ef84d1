"""Coarsest equitable partitions of a matrix by weighted colour refinement.

The matrix is treated as a weighted bipartite graph on rows and columns.
:func:`coarsest_equitable` refines asynchronously from a stack of refining
colours and never pushes the largest piece of a split class, so each vertex
takes part in O(log n) refinement steps. :func:`naive_refine` is the plain
synchronous fixed-point iteration and serves as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .matcore import CheckResult, Partition, SparseMatrix

__all__ = [
    "SplitEvent",
    "RefinementResult",
    "Violation",
    "coarsest_equitable",
    "naive_refine",
    "is_equitable",
    "format_split_log",
]


@dataclass(frozen=True)
class SplitEvent:
    round: int
    refiner: int
    split: int
    parts: int

    def __str__(self) -> str:
        return f"round {self.round} refiner {self.refiner} split {self.split} -> {self.parts} parts"


@dataclass(frozen=True)
class RefinementResult:
    rows: Partition
    cols: Partition
    rounds: int
    split_log: tuple[SplitEvent, ...] = field(default=(), compare=False)

    def is_discrete(self) -> bool:
        return self.rows.is_discrete() and self.cols.is_discrete()


@dataclass(frozen=True)
class Violation:
    """Two rows (or two columns) of one class with different sums into ``against``."""

    side: str
    first: object
    second: object
    against: tuple
    values: tuple

    def __str__(self) -> str:
        kind = "rows" if self.side == "row" else "columns"
        return (
            f"{kind} {self.first!r} and {self.second!r} differ on class {list(self.against)!r}: "
            f"{self.values[0]} != {self.values[1]}"
        )


def format_split_log(events) -> str:
    return "".join(f"{e}\n" for e in events)


def _initial(a: SparseMatrix, init_rows, init_cols) -> tuple[Partition, Partition]:
    rows = Partition.trivial(a.rows) if init_rows is None else init_rows
    cols = Partition.trivial(a.cols) if init_cols is None else init_cols
    if set(rows.ground) != set(a.rows) or len(rows.ground) != len(a.rows):
        raise ValueError("initial row partition is not a partition of the row labels")
    if set(cols.ground) != set(a.cols) or len(cols.ground) != len(a.cols):
        raise ValueError("initial column partition is not a partition of the column labels")
    return rows, cols


def coarsest_equitable(
    a: SparseMatrix,
    init_rows: Partition | None = None,
    init_cols: Partition | None = None,
    *,
    trace: bool = False,
) -> RefinementResult:
    """Coarsest equitable partition of ``a`` refining ``(init_rows, init_cols)``.

    Runs in O((n + m) log n) arithmetic operations for n rows plus columns and
    m nonzero entries. Set ``trace`` to record every class split.
    """
    init_rows, init_cols = _initial(a, init_rows, init_cols)
    n = len(a.rows)
    labels = list(a.rows) + list(a.cols)
    index = {r: i for i, r in enumerate(a.rows)}
    cindex = {c: n + j for j, c in enumerate(a.cols)}
    adj: list[list[tuple[int, object]]] = [[] for _ in labels]
    for (r, c), v in a.items():
        i, j = index[r], cindex[c]
        adj[i].append((j, v))
        adj[j].append((i, v))

    members: list[set[int]] = []
    colour = [0] * len(labels)
    for part, pos in ((init_rows, index), (init_cols, cindex)):
        for cls in part.classes:
            cid = len(members)
            members.append({pos[x] for x in cls})
            for x in cls:
                colour[pos[x]] = cid
    in_stack = [True] * len(members)
    stack = list(range(len(members) - 1, -1, -1))
    log: list[SplitEvent] = []
    rounds = 0

    while stack:
        d = stack.pop()
        in_stack[d] = False
        rounds += 1
        acc: dict[int, object] = {}
        for u in members[d]:
            for x, w in adj[u]:
                acc[x] = acc[x] + w if x in acc else w
        touched: dict[int, list[int]] = {}
        for x, val in acc.items():
            if val != 0:
                touched.setdefault(colour[x], []).append(x)

        for c, xs in touched.items():
            size = len(members[c])
            groups: dict[object, list[int]] = {}
            for x in xs:
                groups.setdefault(acc[x], []).append(x)
            if len(groups) == 1 and len(xs) == size:
                continue
            parts = list(groups.values())
            # the untouched (zero-sum) remainder keeps id c; if there is none
            # the first group stays behind instead
            moving = parts[1:] if len(xs) == size else parts
            new_ids = []
            for part in moving:
                nid = len(members)
                members.append(set(part))
                members[c].difference_update(part)
                for x in part:
                    colour[x] = nid
                in_stack.append(False)
                new_ids.append(nid)
            if trace:
                log.append(SplitEvent(rounds, d, c, len(new_ids) + 1))
            if in_stack[c]:
                withheld = None
            else:
                pieces = [c, *new_ids]
                biggest = max(len(members[p]) for p in pieces)
                tied = [p for p in pieces if len(members[p]) == biggest]
                withheld = tied[0] if len(tied) == 1 else min(tied, key=lambda p: min(members[p]))
            for p in [c, *new_ids]:
                if p != withheld and not in_stack[p]:
                    in_stack[p] = True
                    stack.append(p)

    row_classes = [[labels[i] for i in m] for m in members if m and next(iter(m)) < n]
    col_classes = [[labels[i] for i in m] for m in members if m and next(iter(m)) >= n]
    return RefinementResult(
        Partition(a.rows, row_classes),
        Partition(a.cols, col_classes),
        rounds,
        tuple(log),
    )


def _signature(entries, part: Partition, own: int):
    sums: dict[int, object] = {}
    for other, v in entries.items():
        k = part.class_of(other)
        sums[k] = sums[k] + v if k in sums else v
    return own, tuple(sorted((k, s) for k, s in sums.items() if s != 0))


def naive_refine(
    a: SparseMatrix,
    init_rows: Partition | None = None,
    init_cols: Partition | None = None,
) -> RefinementResult:
    """Synchronous refinement: split rows by their sums into the current
    column classes and columns by their sums over the current row classes,
    until nothing changes."""
    rows, cols = _initial(a, init_rows, init_cols)
    rounds = 0
    while True:
        new_rows = Partition.from_key(a.rows, lambda v: _signature(a.row(v), cols, rows.class_of(v)))
        new_cols = Partition.from_key(a.cols, lambda w: _signature(a.col(w), rows, cols.class_of(w)))
        if len(new_rows) == len(rows) and len(new_cols) == len(cols):
            return RefinementResult(rows, cols, rounds)
        rows, cols = new_rows, new_cols
        rounds += 1


def is_equitable(a: SparseMatrix, rows: Partition, cols: Partition) -> CheckResult:
    """Check that every row of a class has the same sum into each column class,
    and vice versa. On failure the witness is a :class:`Violation`."""
    if set(rows.ground) != set(a.rows) or set(cols.ground) != set(a.cols):
        raise ValueError("partitions do not match the matrix labels")
    for side, part, other, line in (("row", rows, cols, a.row), ("col", cols, rows, a.col)):
        for cls in part.classes:
            ref = None
            for x in cls:
                sums: dict[int, object] = {}
                for y, v in line(x).items():
                    k = other.class_of(y)
                    sums[k] = sums[k] + v if k in sums else v
                sig = {k: s for k, s in sums.items() if s != 0}
                if ref is None:
                    ref = (x, sig)
                    continue
                if sig != ref[1]:
                    bad = next(k for k in sorted(set(sig) | set(ref[1])) if sig.get(k) != ref[1].get(k))
                    values = (ref[1].get(bad, Fraction(0)), sig.get(bad, Fraction(0)))
                    return CheckResult(False, Violation(side, ref[0], x, other.classes[bad], values))
    return CheckResult(True)
