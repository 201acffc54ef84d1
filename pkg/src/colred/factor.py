"""Factor matrices through equitable partitions.

For an equitable partition ``(P, Q)`` of ``A`` the factor matrix is
``Pi_P^s A Pi_Q``; its entry for classes ``(p, q)`` is the sum of any row of
``p`` over the columns of ``q``. Factoring through the coarsest equitable
partition gives the core factor, and repeating until the coarsest partition
is discrete gives the iterated core factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .matcore import (
    PartitionMatrix,
    Partition,
    SparseMatrix,
    identity,
    multiply,
    partition_matrix,
    scaled_transpose,
)
from .refine import coarsest_equitable, is_equitable

__all__ = [
    "FactorStep",
    "FactorChain",
    "class_labels",
    "factor_matrix",
    "core_factor",
    "iterated_core_factor",
    "lift_map",
    "project_map",
    "row_project_map",
    "are_isomorphic",
    "write_chain",
    "read_chain",
]


@dataclass(frozen=True)
class FactorStep:
    C: PartitionMatrix
    D: PartitionMatrix
    B: SparseMatrix

    @property
    def rows(self) -> Partition:
        return self.C.partition

    @property
    def cols(self) -> Partition:
        return self.D.partition


@dataclass(frozen=True)
class FactorChain:
    source: SparseMatrix
    steps: tuple[FactorStep, ...] = field(default=())

    @property
    def final(self) -> SparseMatrix:
        return self.steps[-1].B if self.steps else self.source

    def __len__(self) -> int:
        return len(self.steps)


def class_labels(part: Partition, prefix: str, keep: Iterable = ()) -> list:
    """Names for the classes of ``part``: a singleton whose member is in
    ``keep`` keeps that name, every other class becomes ``<prefix><k>``."""
    keep = set(keep)
    out, k = [], 0
    for cls in part.classes:
        if len(cls) == 1 and cls[0] in keep:
            out.append(cls[0])
        else:
            out.append(f"{prefix}{k}")
            k += 1
    return out


def factor_matrix(
    a: SparseMatrix,
    rows: Partition,
    cols: Partition,
    row_labels: Sequence | None = None,
    col_labels: Sequence | None = None,
    *,
    check: bool = True,
) -> FactorStep:
    """Factor ``a`` through the equitable partition ``(rows, cols)``.

    Raises :class:`~colred.fracauto.NotEquitableError` for a non-equitable partition.
    """
    if check:
        eq = is_equitable(a, rows, cols)
        if not eq:
            from .fracauto import NotEquitableError

            raise NotEquitableError(eq.witness)
    c = partition_matrix(rows, class_labels(rows, "r") if row_labels is None else row_labels)
    d = partition_matrix(cols, class_labels(cols, "x") if col_labels is None else col_labels)
    rlab, clab = c.class_labels, d.class_labels
    entries = {}
    for k, cls in enumerate(rows.classes):
        rep = cls[0]
        sums: dict = {}
        for w, v in a.row(rep).items():
            q = cols.class_of(w)
            sums[q] = sums[q] + v if q in sums else v
        for q, s in sums.items():
            entries[(rlab[k], clab[q])] = s
    return FactorStep(c, d, SparseMatrix(rlab, clab, entries))


def core_factor(
    a: SparseMatrix,
    init_rows: Partition | None = None,
    init_cols: Partition | None = None,
    *,
    keep: Iterable = (),
) -> FactorStep:
    res = coarsest_equitable(a, init_rows, init_cols)
    return factor_matrix(
        a, res.rows, res.cols, class_labels(res.rows, "r", keep), class_labels(res.cols, "x", keep), check=False
    )


def iterated_core_factor(
    a: SparseMatrix,
    init_rows: Partition | None = None,
    init_cols: Partition | None = None,
    *,
    keep: Iterable = (),
    max_steps: int | None = None,
) -> FactorChain:
    """Repeat :func:`core_factor` until the coarsest partition is discrete.

    The initial partitions only constrain the first step. Labels in ``keep``
    that end up as singleton classes keep their name through the chain.
    """
    keep = tuple(keep)
    steps: list[FactorStep] = []
    current = a
    while max_steps is None or len(steps) < max_steps:
        first = not steps
        res = coarsest_equitable(current, init_rows if first else None, init_cols if first else None)
        if res.is_discrete():
            break
        steps.append(
            factor_matrix(
                current,
                res.rows,
                res.cols,
                class_labels(res.rows, "r", keep),
                class_labels(res.cols, "x", keep),
                check=False,
            )
        )
        current = steps[-1].B
    return FactorChain(a, tuple(steps))


def lift_map(chain: FactorChain) -> SparseMatrix:
    """Product of the column partition matrices, original columns x final columns."""
    out = identity(chain.source.cols)
    for step in chain.steps:
        out = multiply(out, step.D.matrix)
    return out


def project_map(chain: FactorChain) -> SparseMatrix:
    """Product of the scaled transposes in reverse order, final columns x original columns."""
    out = identity(chain.source.cols)
    for step in chain.steps:
        out = multiply(scaled_transpose(step.D), out)
    return out


def row_project_map(chain: FactorChain) -> SparseMatrix:
    out = identity(chain.source.rows)
    for step in chain.steps:
        out = multiply(scaled_transpose(step.C), out)
    return out


def _canonical_columns(dense: list[list], perm: Sequence[int]) -> list[tuple]:
    return sorted((tuple(dense[i][j] for i in perm) for j in range(len(dense[0]) if dense else 0)), key=repr)


def are_isomorphic(a: SparseMatrix, b: SparseMatrix, limit: int = 8) -> bool:
    """Exact matrix isomorphism (independent row and column permutations).

    Tries every row permutation of the side with fewer lines, so it is only
    meant for small matrices; raises ValueError beyond ``limit`` lines.
    """
    if a.shape != b.shape:
        return False
    if min(a.shape) > limit:
        raise ValueError("isomorphism test is limited to small matrices")
    if a.shape[0] > a.shape[1]:
        a, b = a.transpose(), b.transpose()
    if sorted(map(repr, a.entries().values())) != sorted(map(repr, b.entries().values())):
        return False
    da, db = a.to_dense(), b.to_dense()
    if not da or not da[0]:
        return True
    target = _canonical_columns(da, range(len(da)))
    return any(_canonical_columns(db, perm) == target for perm in itertools.permutations(range(len(db))))


def write_chain(directory: str | Path, chain: FactorChain) -> None:
    from .formats import dump_matrix, dump_partition

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "source.B").write_text(dump_matrix(chain.source))
    for i, step in enumerate(chain.steps, 1):
        (directory / f"step{i}.rows").write_text(dump_partition(step.rows))
        (directory / f"step{i}.cols").write_text(dump_partition(step.cols))
        (directory / f"step{i}.B").write_text(dump_matrix(step.B))


def read_chain(directory: str | Path) -> FactorChain:
    from .formats import parse_matrix, parse_partition

    directory = Path(directory)
    source = parse_matrix((directory / "source.B").read_text())
    steps = []
    current = source
    i = 1
    while (directory / f"step{i}.B").exists():
        rows = parse_partition((directory / f"step{i}.rows").read_text(), current.rows)
        cols = parse_partition((directory / f"step{i}.cols").read_text(), current.cols)
        b = parse_matrix((directory / f"step{i}.B").read_text())
        steps.append(FactorStep(partition_matrix(rows, b.rows), partition_matrix(cols, b.cols), b))
        current = b
        i += 1
    return FactorChain(source, tuple(steps))
