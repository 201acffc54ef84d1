"""Exact scalars, sparse matrices, vectors and partitions.

Everything here is immutable once built. Scalars are :class:`fractions.Fraction`
values, optionally extended by the single marker :data:`INF`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "INF",
    "ExtReal",
    "InfinityArithmeticError",
    "DomainError",
    "CheckResult",
    "to_ext",
    "is_inf",
    "SparseMatrix",
    "Vector",
    "Partition",
    "PartitionMatrix",
    "partition_matrix",
    "scaled_transpose",
    "aggregate",
    "direct_sum",
    "direct_sum_labels",
    "multiply",
    "mat_vec",
    "identity",
]


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


class InfinityArithmeticError(DomainError):
    """Raised for combinations with INF that have no defined value."""


class _Infinity:
    """The distinguished infinite entry.

    Only the operations used for nonnegative linear combinations are defined:
    ``r + INF == INF`` for any r, ``0 * INF == 0`` and ``r * INF == INF`` for r > 0.
    """

    __slots__ = ()
    _instance: "_Infinity | None" = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_Infinity, ())

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __hash__(self) -> int:
        return 0x1F1F1F1F

    def __eq__(self, other: object) -> bool:
        return other is self

    def __bool__(self) -> bool:
        return True

    def __add__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if other is self:
            return self
        if isinstance(other, (int, Fraction)):
            if other < 0:
                raise InfinityArithmeticError("negative multiple of INF is undefined")
            return self if other > 0 else Fraction(0)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        raise InfinityArithmeticError("-INF is undefined")

    def __sub__(self, other):
        raise InfinityArithmeticError("subtraction involving INF is undefined")

    __rsub__ = __sub__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and other > 0:
            return self
        raise InfinityArithmeticError("INF may only be divided by a positive number")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()

ExtReal = Union[Fraction, _Infinity]


def is_inf(value: Any) -> bool:
    return value is INF


def to_ext(value: Any) -> ExtReal:
    """Coerce ints, Fractions, exact strings (``"3/4"``, ``"inf"``) to an ExtReal."""
    if value is INF:
        return INF
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if s.lower() in ("inf", "+inf", "infinity", "∞"):
            return INF
        return Fraction(s)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction or an exact string")
    raise TypeError(f"cannot convert {value!r} to an exact scalar")


def _to_rational(value: Any) -> Fraction:
    v = to_ext(value)
    if v is INF:
        raise DomainError("INF is not allowed here")
    return v


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a verification, truthy iff it passed; ``witness`` explains a failure."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


Label = Hashable


def _check_labels(labels: Sequence[Label], what: str) -> tuple:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise DomainError(f"duplicate {what} labels")
    return labels


class SparseMatrix:
    """Sparse matrix over ExtReal indexed by ordered row and column label sets.

    Zero entries are never stored. Iteration over entries follows row order,
    then column order.
    """

    __slots__ = ("rows", "cols", "_entries", "_by_row", "_by_col", "infinity_count", "_row_pos", "_col_pos")

    def __init__(
        self,
        rows: Sequence[Label],
        cols: Sequence[Label],
        entries: Mapping[tuple, Any] | Iterable[tuple[tuple, Any]] = (),
    ):
        self.rows = _check_labels(rows, "row")
        self.cols = _check_labels(cols, "column")
        self._row_pos = {r: i for i, r in enumerate(self.rows)}
        self._col_pos = {c: j for j, c in enumerate(self.cols)}
        items = entries.items() if isinstance(entries, Mapping) else entries
        raw: dict[tuple, ExtReal] = {}
        for (r, c), v in items:
            if r not in self._row_pos:
                raise DomainError(f"unknown row label {r!r}")
            if c not in self._col_pos:
                raise DomainError(f"unknown column label {c!r}")
            v = to_ext(v)
            if v is INF or v != 0:
                raw[(r, c)] = v
            else:
                raw.pop((r, c), None)
        rp, cp = self._row_pos, self._col_pos
        ordered = sorted(raw, key=lambda k: (rp[k[0]], cp[k[1]]))
        self._entries = {k: raw[k] for k in ordered}
        self._by_row: dict[Label, dict[Label, ExtReal]] = {}
        self._by_col: dict[Label, dict[Label, ExtReal]] = {}
        inf_count = 0
        for (r, c), v in self._entries.items():
            self._by_row.setdefault(r, {})[c] = v
            self._by_col.setdefault(c, {})[r] = v
            if v is INF:
                inf_count += 1
        self.infinity_count = inf_count

    @classmethod
    def from_dense(
        cls,
        data: Sequence[Sequence[Any]],
        rows: Sequence[Label] | None = None,
        cols: Sequence[Label] | None = None,
    ) -> "SparseMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else (len(cols) if cols is not None else 0)
        if any(len(row) != ncols for row in data):
            raise DomainError("ragged dense matrix")
        rows = [str(i + 1) for i in range(nrows)] if rows is None else rows
        cols = [str(j + 1) for j in range(ncols)] if cols is None else cols
        if len(rows) != nrows or len(cols) != ncols:
            raise DomainError("label count does not match dense shape")
        return cls(rows, cols, (((rows[i], cols[j]), v) for i, row in enumerate(data) for j, v in enumerate(row)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def get(self, r: Label, c: Label) -> ExtReal:
        return self._entries.get((r, c), Fraction(0))

    def __getitem__(self, key: tuple) -> ExtReal:
        r, c = key
        if r not in self._row_pos or c not in self._col_pos:
            raise KeyError(key)
        return self.get(r, c)

    def items(self) -> Iterator[tuple[tuple, ExtReal]]:
        return iter(self._entries.items())

    def entries(self) -> Mapping[tuple, ExtReal]:
        return dict(self._entries)

    def row(self, r: Label) -> Mapping[Label, ExtReal]:
        return self._by_row.get(r, {})

    def col(self, c: Label) -> Mapping[Label, ExtReal]:
        return self._by_col.get(c, {})

    def row_index(self, r: Label) -> int:
        return self._row_pos[r]

    def col_index(self, c: Label) -> int:
        return self._col_pos[c]

    def has_row(self, r: Label) -> bool:
        return r in self._row_pos

    def has_col(self, c: Label) -> bool:
        return c in self._col_pos

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, (((c, r), v) for (r, c), v in self._entries.items()))

    def to_dense(self) -> list[list[ExtReal]]:
        return [[self.get(r, c) for c in self.cols] for r in self.rows]

    def submatrix(self, rows: Sequence[Label], cols: Sequence[Label]) -> "SparseMatrix":
        rs, cs = set(rows), set(cols)
        return SparseMatrix(rows, cols, ((k, v) for k, v in self._entries.items() if k[0] in rs and k[1] in cs))

    def relabel(self, row_map: Callable[[Label], Label], col_map: Callable[[Label], Label]) -> "SparseMatrix":
        return SparseMatrix(
            [row_map(r) for r in self.rows],
            [col_map(c) for c in self.cols],
            (((row_map(r), col_map(c)), v) for (r, c), v in self._entries.items()),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(self._entries.items())))

    def __repr__(self) -> str:
        return f"SparseMatrix({len(self.rows)}x{len(self.cols)}, nnz={self.nnz})"

    def pretty(self) -> str:
        cells = [[str(v) for v in row] for row in self.to_dense()]
        width = max((len(s) for row in cells for s in row), default=1)
        return "\n".join(" ".join(s.rjust(width) for s in row) for row in cells)


def identity(labels: Sequence[Label]) -> SparseMatrix:
    return SparseMatrix(labels, labels, (((x, x), 1) for x in labels))


class Vector:
    """Rational vector indexed by an ordered label set; missing labels are zero."""

    __slots__ = ("ids", "_values")

    def __init__(self, ids: Sequence[Label], values: Mapping[Label, Any] | None = None):
        self.ids = _check_labels(ids, "vector")
        known = set(self.ids)
        vals: dict[Label, Fraction] = {}
        for k, v in (values or {}).items():
            if k not in known:
                raise DomainError(f"unknown vector label {k!r}")
            vals[k] = _to_rational(v)
        self._values = {k: vals.get(k, Fraction(0)) for k in self.ids}

    @classmethod
    def from_list(cls, ids: Sequence[Label], values: Sequence[Any]) -> "Vector":
        if len(ids) != len(values):
            raise DomainError("length mismatch")
        return cls(ids, dict(zip(ids, values)))

    def __getitem__(self, k: Label) -> Fraction:
        return self._values[k]

    def __len__(self) -> int:
        return len(self.ids)

    def items(self):
        return self._values.items()

    def to_list(self) -> list[Fraction]:
        return [self._values[k] for k in self.ids]

    def dot(self, other: "Vector") -> Fraction:
        if set(self.ids) != set(other.ids):
            raise DomainError("vectors are indexed by different label sets")
        return sum((v * other[k] for k, v in self._values.items()), Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self.ids == other.ids and self._values == other._values

    def __hash__(self) -> int:
        return hash(tuple(self._values.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._values.items())
        return f"Vector({{{body}}})"


class Partition:
    """Partition of an ordered ground set into nonempty classes.

    Classes are kept in canonical order: members in ground-set order, classes
    ordered by their first member. Two partitions are equal iff they have the
    same ground set and the same classes.
    """

    __slots__ = ("ground", "classes", "_class_of")

    def __init__(self, ground: Sequence[Label], classes: Iterable[Iterable[Label]]):
        self.ground = _check_labels(ground, "ground-set")
        pos = {x: i for i, x in enumerate(self.ground)}
        seen: set = set()
        canon = []
        for cls in classes:
            members = list(cls)
            if not members:
                raise DomainError("empty class in partition")
            for x in members:
                if x not in pos:
                    raise DomainError(f"label {x!r} is not in the ground set")
                if x in seen:
                    raise DomainError(f"label {x!r} appears in two classes")
                seen.add(x)
            canon.append(tuple(sorted(members, key=pos.__getitem__)))
        if len(seen) != len(self.ground):
            missing = [x for x in self.ground if x not in seen]
            raise DomainError(f"partition does not cover {missing[:5]!r}")
        canon.sort(key=lambda c: pos[c[0]])
        self.classes: tuple[tuple, ...] = tuple(canon)
        self._class_of = {x: i for i, c in enumerate(self.classes) for x in c}

    @classmethod
    def trivial(cls, ground: Sequence[Label]) -> "Partition":
        ground = tuple(ground)
        return cls(ground, [ground] if ground else [])

    @classmethod
    def discrete(cls, ground: Sequence[Label]) -> "Partition":
        return cls(ground, [[x] for x in ground])

    @classmethod
    def from_key(cls, ground: Sequence[Label], key: Callable[[Label], Hashable]) -> "Partition":
        groups: dict = {}
        for x in ground:
            groups.setdefault(key(x), []).append(x)
        return cls(ground, groups.values())

    def class_of(self, x: Label) -> int:
        return self._class_of[x]

    def class_containing(self, x: Label) -> tuple:
        return self.classes[self._class_of[x]]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i: int) -> tuple:
        return self.classes[i]

    def is_discrete(self) -> bool:
        return len(self.classes) == len(self.ground)

    def is_trivial(self) -> bool:
        return len(self.classes) <= 1

    def refines(self, other: "Partition") -> bool:
        """True iff every class of ``self`` lies inside a class of ``other``."""
        if set(self.ground) != set(other.ground):
            return False
        return all(len({other.class_of(x) for x in c}) == 1 for c in self.classes)

    def restrict(self, subset: Iterable[Label]) -> "Partition":
        keep = set(subset)
        ground = [x for x in self.ground if x in keep]
        return Partition(ground, [[x for x in c if x in keep] for c in self.classes if any(x in keep for x in c)])

    def relabel(self, mapping: Callable[[Label], Label]) -> "Partition":
        return Partition([mapping(x) for x in self.ground], [[mapping(x) for x in c] for c in self.classes])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return set(self.ground) == set(other.ground) and set(map(frozenset, self.classes)) == set(
            map(frozenset, other.classes)
        )

    def __hash__(self) -> int:
        return hash(frozenset(map(frozenset, self.classes)))

    def __repr__(self) -> str:
        inner = " | ".join(" ".join(map(str, c)) for c in self.classes)
        return f"Partition({inner})"


@dataclass(frozen=True)
class PartitionMatrix:
    """0/1 matrix with one 1 per row (ground element) and column per class."""

    partition: Partition
    matrix: SparseMatrix

    @property
    def class_labels(self) -> tuple:
        return self.matrix.cols


def partition_matrix(partition: Partition, class_labels: Sequence[Label] | None = None) -> PartitionMatrix:
    if class_labels is None:
        class_labels = [f"P{k}" for k in range(len(partition))]
    class_labels = tuple(class_labels)
    if len(class_labels) != len(partition):
        raise DomainError("need exactly one label per class")
    entries = ((x, class_labels[k]) for k, c in enumerate(partition.classes) for x in c)
    return PartitionMatrix(partition, SparseMatrix(partition.ground, class_labels, ((e, 1) for e in entries)))


def scaled_transpose(pi: PartitionMatrix) -> SparseMatrix:
    """Transpose of ``pi`` with each row scaled to sum to 1."""
    labels = pi.class_labels
    entries = []
    for k, cls in enumerate(pi.partition.classes):
        weight = Fraction(1, len(cls))
        entries.extend(((labels[k], x), weight) for x in cls)
    return SparseMatrix(labels, pi.partition.ground, entries)


def aggregate(a: SparseMatrix, rows: Iterable[Label], cols: Iterable[Label]) -> ExtReal:
    """Sum of the entries of ``a`` in the rectangle ``rows x cols``."""
    rows = list(rows)
    colset = set(cols)
    for r in rows:
        if not a.has_row(r):
            raise DomainError(f"unknown row label {r!r}")
    for c in colset:
        if not a.has_col(c):
            raise DomainError(f"unknown column label {c!r}")
    total: ExtReal = Fraction(0)
    for r in rows:
        for c, v in a.row(r).items():
            if c in colset:
                total = total + v
    return total


def direct_sum_labels(a1: SparseMatrix, a2: SparseMatrix, force: bool = False):
    """Label maps used by :func:`direct_sum`.

    Labels are kept as they are unless they collide (or ``force``), in which
    case every label is prefixed with ``1:`` or ``2:`` according to its side.
    """
    collide = bool(set(a1.rows) & set(a2.rows) or set(a1.cols) & set(a2.cols))
    if force or collide:
        return (lambda x: f"1:{x}"), (lambda x: f"2:{x}")
    return (lambda x: x), (lambda x: x)


def direct_sum(a1: SparseMatrix, a2: SparseMatrix, force_prefix: bool = False) -> SparseMatrix:
    """Block-diagonal matrix ``a1 (+) a2``; see :func:`direct_sum_labels` for relabelling."""
    f1, f2 = direct_sum_labels(a1, a2, force_prefix)
    rows = [f1(r) for r in a1.rows] + [f2(r) for r in a2.rows]
    cols = [f1(c) for c in a1.cols] + [f2(c) for c in a2.cols]
    entries = [((f1(r), f1(c)), v) for (r, c), v in a1.items()]
    entries += [((f2(r), f2(c)), v) for (r, c), v in a2.items()]
    return SparseMatrix(rows, cols, entries)


def _ext_mul(x: ExtReal, y: ExtReal) -> ExtReal:
    return x * y


def multiply(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Exact product ``a @ b``; the column labels of ``a`` must equal the row labels of ``b``."""
    if set(a.cols) != set(b.rows) or len(a.cols) != len(b.rows):
        raise DomainError("inner label sets differ")
    out: dict[tuple, ExtReal] = {}
    for r in a.rows:
        acc: dict = {}
        for k, x in a.row(r).items():
            for c, y in b.row(k).items():
                p = _ext_mul(x, y)
                acc[c] = acc[c] + p if c in acc else p
        for c, v in acc.items():
            out[(r, c)] = v
    return SparseMatrix(a.rows, b.cols, out)


def mat_vec(a: SparseMatrix, x: Vector) -> Vector:
    if set(a.cols) != set(x.ids) or len(a.cols) != len(x.ids):
        raise DomainError("vector labels do not match matrix columns")
    if a.infinity_count:
        raise DomainError("matrix-vector products are only defined for finite matrices")
    values = {}
    for r in a.rows:
        values[r] = sum((v * x[c] for c, v in a.row(r).items()), Fraction(0))
    return Vector(a.rows, values)
