"""A small MPS reader (fixed or free layout, whitespace separated).

Supported sections: NAME, OBJSENSE, ROWS, COLUMNS, RHS, BOUNDS, ENDATA.
Integrality markers are ignored, so integer programs are read as their LP
relaxation. RANGES and SOS sections are rejected.

An all-equality minimisation with default bounds becomes a standard-form
program. Anything else becomes ``max c x  s.t.  A x <= b``: G rows are
negated, E rows are split into ``<row>[le]`` and ``<row>[ge]``, and each finite
bound adds a row ``lo[<col>]`` or ``up[<col>]``. A minimisation negates ``c``.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .formats import ParseError
from .matcore import SparseMatrix, Vector

__all__ = ["MpsModel", "parse_mps_model", "parse_mps", "to_linear_program"]

_SECTIONS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"}
_REJECTED = {"RANGES", "SOS", "QUADOBJ", "QMATRIX", "QSECTION", "QCMATRIX", "CSECTION", "INDICATORS"}
_VALUED_BOUNDS = {"UP", "LO", "FX", "LI", "UI"}
_PLAIN_BOUNDS = {"FR", "MI", "PL", "BV"}


def _number(token: str, line: int) -> Fraction:
    try:
        d = Decimal(token)
    except InvalidOperation:
        raise ParseError(f"bad number {token!r}", line) from None
    if not d.is_finite():
        raise ParseError(f"non-finite number {token!r}", line)
    return Fraction(d)


class MpsModel:
    """Parsed MPS contents before conversion to a linear program."""

    def __init__(self):
        self.name = ""
        self.maximize = False
        self.objective = None
        self.free_rows: set[str] = set()
        self.row_types: dict[str, str] = {}
        self.columns: list[str] = []
        self.coef: dict[tuple[str, str], Fraction] = {}
        self.cost: dict[str, Fraction] = {}
        self.rhs: dict[str, Fraction] = {}
        self.lower: dict[str, Fraction | None] = {}
        self.upper: dict[str, Fraction | None] = {}

    @property
    def rows(self) -> list[str]:
        return list(self.row_types)

    def has_default_bounds(self) -> bool:
        return all(self.lower[c] == 0 and self.upper[c] is None for c in self.columns)


def parse_mps_model(text: str) -> MpsModel:
    m = MpsModel()
    section = None
    seen_cols: set[str] = set()
    for no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        toks = raw.split()
        if not raw[0].isspace():
            head = toks[0].upper()
            if head in _REJECTED:
                raise ParseError(f"unsupported MPS section {head}", no)
            if head not in _SECTIONS:
                raise ParseError(f"unknown MPS section {toks[0]!r}", no)
            section = head
            if head == "NAME":
                m.name = " ".join(toks[1:])
            elif head == "OBJSENSE" and len(toks) > 1:
                m.maximize = _sense(toks[1], no)
            elif head == "ENDATA":
                break
            continue
        if section == "OBJSENSE":
            m.maximize = _sense(toks[0], no)
        elif section == "ROWS":
            if len(toks) != 2 or toks[0].upper() not in ("N", "L", "G", "E"):
                raise ParseError("ROWS lines need a type N, L, G or E and a name", no)
            kind, name = toks[0].upper(), toks[1]
            if kind == "N":
                # only the first N row is the objective, later ones are dropped
                if m.objective is None:
                    m.objective = name
                else:
                    m.free_rows.add(name)
                continue
            if name in m.row_types:
                raise ParseError(f"duplicate row {name!r}", no)
            m.row_types[name] = kind
        elif section == "COLUMNS":
            if "'MARKER'" in toks or "MARKER" in toks:
                continue
            if len(toks) not in (3, 5):
                raise ParseError("COLUMNS lines need a column and one or two row/value pairs", no)
            col = toks[0]
            if col not in seen_cols:
                seen_cols.add(col)
                m.columns.append(col)
                m.lower[col], m.upper[col] = Fraction(0), None
            for row, val in zip(toks[1::2], toks[2::2]):
                v = _number(val, no)
                if row == m.objective:
                    m.cost[col] = m.cost.get(col, 0) + v
                elif row in m.row_types:
                    m.coef[(row, col)] = m.coef.get((row, col), 0) + v
                elif row not in m.free_rows:
                    raise ParseError(f"unknown row {row!r}", no)
        elif section == "RHS":
            pairs = toks[1:] if len(toks) % 2 else toks
            for row, val in zip(pairs[0::2], pairs[1::2]):
                v = _number(val, no)
                if row in m.row_types:
                    m.rhs[row] = v
                elif row != m.objective and row not in m.free_rows:
                    raise ParseError(f"unknown row {row!r}", no)
        elif section == "BOUNDS":
            _bound(m, toks, no)
        else:
            raise ParseError("data line outside of a section", no)
    if m.objective is None:
        raise ParseError("no objective (N) row")
    return m


def _sense(token: str, line: int) -> bool:
    t = token.upper()
    if t in ("MAX", "MAXIMIZE"):
        return True
    if t in ("MIN", "MINIMIZE"):
        return False
    raise ParseError(f"unknown objective sense {token!r}", line)


def _bound(m: MpsModel, toks: list[str], no: int) -> None:
    kind = toks[0].upper()
    if kind in _VALUED_BOUNDS:
        if len(toks) not in (3, 4):
            raise ParseError(f"{kind} bound needs a column and a value", no)
        col, val = toks[-2], _number(toks[-1], no)
    elif kind in _PLAIN_BOUNDS:
        if len(toks) not in (2, 3, 4):
            raise ParseError(f"{kind} bound needs a column", no)
        col = toks[2] if len(toks) >= 3 else toks[1]
        val = None
    else:
        raise ParseError(f"unsupported bound type {toks[0]!r}", no)
    if col not in m.lower:
        raise ParseError(f"bound on unknown column {col!r}", no)
    if kind in ("UP", "UI"):
        m.upper[col] = val
    elif kind in ("LO", "LI"):
        m.lower[col] = val
    elif kind == "FX":
        m.lower[col] = m.upper[col] = val
    elif kind == "FR":
        m.lower[col], m.upper[col] = None, None
    elif kind == "MI":
        m.lower[col] = None
    elif kind == "PL":
        m.upper[col] = None
    elif kind == "BV":
        m.lower[col], m.upper[col] = Fraction(0), Fraction(1)


def to_linear_program(m: MpsModel):
    from .lpreduce import Form, LinearProgram

    cols = m.columns
    by_row: dict[str, dict[str, Fraction]] = {r: {} for r in m.row_types}
    for (r, c), v in m.coef.items():
        by_row[r][c] = v

    if not m.maximize and m.has_default_bounds() and all(t == "E" for t in m.row_types.values()):
        rows = m.rows
        a = SparseMatrix(rows, cols, {(r, c): v for r in rows for c, v in by_row[r].items()})
        return LinearProgram(Form.STANDARD_MIN, a, Vector(rows, m.rhs), Vector(cols, m.cost))

    rows: list[str] = []
    entries: dict[tuple[str, str], Fraction] = {}
    rhs: dict[str, Fraction] = {}

    def add(name, coeffs, bound, sign):
        rows.append(name)
        for c, v in coeffs.items():
            entries[(name, c)] = sign * v
        rhs[name] = sign * bound

    for r, kind in m.row_types.items():
        b = m.rhs.get(r, Fraction(0))
        if kind == "L":
            add(r, by_row[r], b, 1)
        elif kind == "G":
            add(r, by_row[r], b, -1)
        else:
            add(f"{r}[le]", by_row[r], b, 1)
            add(f"{r}[ge]", by_row[r], b, -1)
    for c in cols:
        if m.lower[c] is not None:
            add(f"lo[{c}]", {c: Fraction(1)}, m.lower[c], -1)
    for c in cols:
        if m.upper[c] is not None:
            add(f"up[{c}]", {c: Fraction(1)}, m.upper[c], 1)
    sign = 1 if m.maximize else -1
    cost = {c: sign * v for c, v in m.cost.items()}
    return LinearProgram(Form.DUAL_MAX, SparseMatrix(rows, cols, entries), Vector(rows, rhs), Vector(cols, cost))


def parse_mps(text: str):
    return to_linear_program(parse_mps_model(text))
