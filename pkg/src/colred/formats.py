"""Line-oriented text formats for matrices, partitions, LPs and solutions.

Triplet matrix format::

    matrix <nrows> <ncols>
    rows <label> ...        # optional, defaults to 1..nrows
    cols <label> ...        # optional, defaults to 1..ncols
    <row> <col> <value>     # values: integers, p/q, decimals or inf

Partition format: one class per line, labels separated by spaces.
Blank lines and ``#`` comments are ignored everywhere.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .matcore import INF, Partition, SparseMatrix, to_ext

__all__ = [
    "ParseError",
    "format_value",
    "parse_value",
    "dump_matrix",
    "load_matrix",
    "parse_matrix",
    "dump_partition",
    "parse_partition",
    "read_matrix",
    "write_matrix",
    "read_partition",
    "write_partition",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


def format_value(v) -> str:
    if v is INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_value(token: str, line: int | None = None):
    try:
        return to_ext(token)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"bad numeric value {token!r}", line) from exc


def _content_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def dump_matrix(a: SparseMatrix) -> str:
    out = [f"matrix {len(a.rows)} {len(a.cols)}"]
    out.append(" ".join(["rows", *map(str, a.rows)]))
    out.append(" ".join(["cols", *map(str, a.cols)]))
    for (r, c), v in a.items():
        out.append(f"{r} {c} {format_value(v)}")
    return "\n".join(out) + "\n"


def _parse_matrix_lines(lines: list[tuple[int, list[str]]]) -> SparseMatrix:
    if not lines:
        raise ParseError("empty matrix text")
    no, head = lines[0]
    if head[0] != "matrix" or len(head) != 3:
        raise ParseError("expected header 'matrix <nrows> <ncols>'", no)
    try:
        nrows, ncols = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ParseError("matrix dimensions must be integers", no) from exc
    if nrows < 0 or ncols < 0:
        raise ParseError("negative matrix dimension", no)
    rows = [str(i + 1) for i in range(nrows)]
    cols = [str(j + 1) for j in range(ncols)]
    entries: dict = {}
    for no, toks in lines[1:]:
        if toks[0] == "rows" and len(toks) == nrows + 1 and not entries:
            rows = toks[1:]
            continue
        if toks[0] == "cols" and len(toks) == ncols + 1 and not entries:
            cols = toks[1:]
            continue
        if len(toks) != 3:
            raise ParseError("expected '<row> <col> <value>'", no)
        r, c, val = toks
        if (r, c) in entries:
            raise ParseError(f"duplicate entry ({r}, {c})", no)
        entries[(r, c)] = (no, parse_value(val, no))
    rowset, colset = set(rows), set(cols)
    if len(rowset) != len(rows) or len(colset) != len(cols):
        raise ParseError("duplicate labels in rows/cols declaration")
    for (r, c), (no, _) in entries.items():
        if r not in rowset:
            raise ParseError(f"unknown row label {r!r}", no)
        if c not in colset:
            raise ParseError(f"unknown column label {c!r}", no)
    return SparseMatrix(rows, cols, {k: v for k, (_, v) in entries.items()})


def parse_matrix(text: str) -> SparseMatrix:
    return _parse_matrix_lines(list(_content_lines(text)))


load_matrix = parse_matrix


def dump_partition(p: Partition) -> str:
    return "".join(" ".join(map(str, c)) + "\n" for c in p.classes)


def parse_partition(text: str, ground: Iterable[str] | None = None) -> Partition:
    classes = [toks for _, toks in _content_lines(text)]
    if ground is None:
        ground = [x for c in classes for x in c]
    try:
        return Partition(list(ground), classes)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def read_matrix(path: str | Path) -> SparseMatrix:
    path = Path(path)
    try:
        return parse_matrix(path.read_text())
    except ParseError as exc:
        raise ParseError(exc.message, exc.line, str(path)) from exc


def write_matrix(path: str | Path, a: SparseMatrix) -> None:
    Path(path).write_text(dump_matrix(a))


def read_partition(path: str | Path, ground: Iterable[str] | None = None) -> Partition:
    return parse_partition(Path(path).read_text(), ground)


def write_partition(path: str | Path, p: Partition) -> None:
    Path(path).write_text(dump_partition(p))
