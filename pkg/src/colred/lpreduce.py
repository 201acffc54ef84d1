"""Reduce linear programs and equation systems through equitable partitions.

``b`` and ``c`` are folded into an extended matrix with one extra row (the
objective), one extra column (the right-hand side) and a single INF corner.
Factoring that matrix through its coarsest equitable partition, optionally
repeatedly, yields the reduced problem; solutions move between the two
problems by the lift map ``D`` and the projection ``D^s``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .factor import FactorChain, iterated_core_factor, lift_map, project_map
from .matcore import INF, DomainError, Partition, SparseMatrix, Vector, mat_vec
from .lpsolve import Solution, Status, check_feasible, solve

__all__ = [
    "Form",
    "LinearProgram",
    "ReducedLP",
    "ReductionInvariantError",
    "INF_ROW",
    "INF_COL",
    "build_tilde",
    "initial_partitions",
    "reduce",
    "lift",
    "project",
    "solve_via_reduction",
    "dump_lp",
    "parse_lp",
    "read_lp",
    "write_bundle",
]

INF_ROW = "v_inf"
INF_COL = "w_inf"


class Form(enum.Enum):
    STANDARD_MIN = "standard-min"
    DUAL_MAX = "dual-max"
    EQUATIONS = "equations"


class ReductionInvariantError(RuntimeError):
    """A transferred solution violated a constraint it must satisfy."""


@dataclass(frozen=True)
class LinearProgram:
    form: Form
    A: SparseMatrix
    b: Vector
    c: Vector

    def __post_init__(self):
        if self.A.infinity_count:
            raise DomainError("LP constraint matrix must be finite")
        if set(self.b.ids) != set(self.A.rows) or len(self.b) != len(self.A.rows):
            raise DomainError("b must be indexed by the rows of A")
        if set(self.c.ids) != set(self.A.cols) or len(self.c) != len(self.A.cols):
            raise DomainError("c must be indexed by the columns of A")
        if self.form is Form.EQUATIONS and any(v for _, v in self.c.items()):
            raise DomainError("equation systems carry a zero objective")

    @classmethod
    def equations(cls, a: SparseMatrix, b: Vector) -> "LinearProgram":
        return cls(Form.EQUATIONS, a, b, Vector(a.cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def objective(self, x: Vector) -> Fraction:
        return self.c.dot(x)


def _fresh(label: str, taken) -> str:
    while label in taken:
        label += "_"
    return label


def _inf_labels(lp: LinearProgram) -> tuple[str, str]:
    return _fresh(INF_ROW, set(lp.A.rows)), _fresh(INF_COL, set(lp.A.cols))


def build_tilde(lp: LinearProgram) -> SparseMatrix:
    """``A`` with ``b`` appended as a column, ``c`` as a row and INF in the corner."""
    vinf, winf = _inf_labels(lp)
    entries = dict(lp.A.items())
    for r, v in lp.b.items():
        entries[(r, winf)] = v
    for w, v in lp.c.items():
        entries[(vinf, w)] = v
    entries[(vinf, winf)] = INF
    tilde = SparseMatrix((*lp.A.rows, vinf), (*lp.A.cols, winf), entries)
    if tilde.infinity_count != 1:
        raise AssertionError("extended matrix must carry exactly one INF entry")
    return tilde


def initial_partitions(lp: LinearProgram) -> tuple[Partition, Partition]:
    """Rows grouped by equal ``b`` entries, columns by equal ``c`` entries."""
    return (
        Partition.from_key(lp.A.rows, lambda r: lp.b[r]),
        Partition.from_key(lp.A.cols, lambda w: lp.c[w]),
    )


@dataclass(frozen=True)
class ReducedLP:
    original: LinearProgram
    reduced: LinearProgram
    chain: FactorChain
    inf_row: str
    inf_col: str

    @property
    def lift_matrix(self) -> SparseMatrix:
        """``D``: original variables x reduced variables."""
        full = lift_map(self.chain)
        return full.submatrix(self.original.A.cols, self.reduced.A.cols)

    @property
    def project_matrix(self) -> SparseMatrix:
        """``D^s``: reduced variables x original variables."""
        full = project_map(self.chain)
        return full.submatrix(self.reduced.A.cols, self.original.A.cols)

    def lift(self, x_reduced: Vector, *, check: bool = True) -> Vector:
        return lift(self, x_reduced, check=check)

    def project(self, x: Vector) -> Vector:
        return project(self, x)


def _lp_from_factor(form: Form, b_mat: SparseMatrix, vinf: str, winf: str) -> LinearProgram:
    rows = [r for r in b_mat.rows if r != vinf]
    cols = [w for w in b_mat.cols if w != winf]
    a = b_mat.submatrix(rows, cols)
    b = Vector(rows, {r: b_mat.get(r, winf) for r in rows})
    c = Vector(cols, {w: b_mat.get(vinf, w) for w in cols})
    return LinearProgram(form, a, b, c)


def reduce(lp: LinearProgram, iterate: bool = True) -> ReducedLP:
    """Reduce ``lp`` through the coarsest equitable partition of its extended
    matrix; with ``iterate`` keep factoring until nothing shrinks."""
    vinf, winf = _inf_labels(lp)
    tilde = build_tilde(lp)
    chain = iterated_core_factor(tilde, keep=(vinf, winf), max_steps=None if iterate else 1)
    if not chain.steps:
        reduced = lp
    else:
        reduced = _lp_from_factor(lp.form, chain.final, vinf, winf)
    return ReducedLP(lp, reduced, chain, vinf, winf)


def lift(r: ReducedLP, x_reduced: Vector, *, check: bool = True) -> Vector:
    """``x = D x'``. With ``check``, a feasible ``x'`` must lift to a feasible ``x``."""
    if set(x_reduced.ids) != set(r.reduced.A.cols):
        raise DomainError("vector is not indexed by the reduced variables")
    x_reduced = Vector(r.reduced.A.cols, dict(x_reduced.items()))
    x = mat_vec(r.lift_matrix, x_reduced)
    if check and check_feasible(r.reduced, x_reduced):
        res = check_feasible(r.original, x)
        if not res:
            raise ReductionInvariantError(f"lifted solution violates {res.witness}")
        if r.original.objective(x) != r.reduced.objective(x_reduced):
            raise ReductionInvariantError("lifted solution changed the objective value")
    return x


def project(r: ReducedLP, x: Vector) -> Vector:
    """``x' = D^s x``."""
    if set(x.ids) != set(r.original.A.cols):
        raise DomainError("vector is not indexed by the original variables")
    x = Vector(r.original.A.cols, dict(x.items()))
    return mat_vec(r.project_matrix, x)


def solve_via_reduction(lp: LinearProgram, iterate: bool = True) -> tuple[Solution, ReducedLP]:
    """Reduce, solve the reduced problem and lift the answer back.

    The lifted point is checked against the original constraints. An
    unbounded ray is lifted by the same map.
    """
    r = reduce(lp, iterate)
    sol = solve(r.reduced)
    if sol.x is None:
        return Solution(sol.status, iterations=sol.iterations), r
    x = lift(r, sol.x)
    res = check_feasible(lp, x)
    if not res:
        raise ReductionInvariantError(f"lifted solution violates {res.witness}")
    ray = None if sol.ray is None else mat_vec(r.lift_matrix, Vector(r.reduced.A.cols, dict(sol.ray.items())))
    objective = None if sol.objective is None else lp.objective(x)
    if sol.status is Status.OPTIMAL and objective != sol.objective:
        raise ReductionInvariantError("lifted solution changed the objective value")
    return Solution(sol.status, x, objective, ray, sol.iterations), r


def dump_lp(lp: LinearProgram) -> str:
    from .formats import dump_matrix, format_value

    out = [f"form {lp.form.value}", "A", dump_matrix(lp.A).rstrip("\n"), "b"]
    out.extend(f"{k} {format_value(v)}" for k, v in lp.b.items())
    out.append("c")
    out.extend(f"{k} {format_value(v)}" for k, v in lp.c.items())
    return "\n".join(out) + "\n"


def parse_lp(text: str) -> LinearProgram:
    """Parse the native LP format (sections ``form``, ``A``, ``b``, ``c``)."""
    from .formats import ParseError, _content_lines, _parse_matrix_lines, parse_value

    form = None
    section = None
    a_lines: list = []
    vecs: dict[str, dict] = {"b": {}, "c": {}}
    for no, toks in _content_lines(text):
        if toks[0] == "form" and len(toks) == 2:
            try:
                form = Form(toks[1])
            except ValueError as exc:
                raise ParseError(f"unknown form {toks[1]!r}", no) from exc
            section = None
            continue
        if len(toks) == 1 and toks[0] in ("A", "b", "c"):
            section = toks[0]
            continue
        if section == "A":
            a_lines.append((no, toks))
        elif section in ("b", "c"):
            if len(toks) != 2:
                raise ParseError(f"expected '<label> <value>' in section {section}", no)
            val = parse_value(toks[1], no)
            if val is INF:
                raise ParseError("LP data must be finite", no)
            vecs[section][toks[0]] = val
        else:
            raise ParseError("line outside of any section", no)
    if form is None:
        raise ParseError("missing 'form' line")
    if not a_lines:
        raise ParseError("missing 'A' section")
    a = _parse_matrix_lines(a_lines)
    for sec, labels in (("b", a.rows), ("c", a.cols)):
        unknown = set(vecs[sec]) - set(labels)
        if unknown:
            raise ParseError(f"section {sec} names unknown labels {sorted(unknown)[:5]}")
    try:
        return LinearProgram(form, a, Vector(a.rows, vecs["b"]), Vector(a.cols, vecs["c"]))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def read_lp(path: str | Path) -> LinearProgram:
    """Read a native LP file, or an MPS file when the suffix is ``.mps``."""
    from .formats import ParseError

    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".mps" or not text.lstrip().startswith(("form", "#")):
            from .mps import parse_mps

            return parse_mps(text)
        return parse_lp(text)
    except ParseError as exc:
        raise ParseError(exc.message, exc.line, str(path)) from exc


def write_bundle(directory: str | Path, r: ReducedLP) -> None:
    """Reduced LP (``reduced.lp``), chain files and the lift map (``liftmap``)."""
    from .factor import write_chain
    from .formats import dump_matrix

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "reduced.lp").write_text(dump_lp(r.reduced))
    write_chain(directory / "chain", r.chain)
    (directory / "liftmap").write_text(dump_matrix(r.lift_matrix))
