"""Exact rational solver for the three LP forms.

Standard form (min c.x, Ax = b, x >= 0) uses a two-phase primal simplex with
Bland's rule. Dual form (max c.x, Ax <= b) is rewritten in standard form with
split free variables and slacks. Equation systems use fraction-free Gaussian
elimination.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .matcore import CheckResult, DomainError, Vector

__all__ = [
    "Status",
    "Solution",
    "IterationLimitError",
    "solve",
    "solve_standard",
    "check_feasible",
    "format_solution",
    "parse_solution",
]

ZERO = Fraction(0)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Solution:
    status: Status
    x: Vector | None = None
    objective: Fraction | None = None
    ray: Vector | None = None
    iterations: int = 0


class IterationLimitError(RuntimeError):
    pass


class _Tableau:
    """Sparse simplex tableau: each row maps column index -> coefficient."""

    def __init__(self, rows: list[dict[int, Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cost: dict[int, Fraction] = {}
        self.value = ZERO
        self.pivots = 0

    def set_objective(self, c: dict[int, Fraction]) -> None:
        # reduced costs c_j - c_B B^-1 a_j and the objective value c_B B^-1 b
        cost = {j: v for j, v in c.items() if v}
        value = ZERO
        for i, bj in enumerate(self.basis):
            cb = c.get(bj, ZERO)
            if not cb:
                continue
            value += cb * self.rhs[i]
            for j, v in self.rows[i].items():
                nv = cost.get(j, ZERO) - cb * v
                if nv:
                    cost[j] = nv
                else:
                    cost.pop(j, None)
        self.cost = cost
        self.value = value

    def pivot(self, r: int, e: int) -> None:
        row = self.rows[r]
        piv = row[e]
        if piv != 1:
            inv = 1 / piv
            for j in row:
                row[j] *= inv
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r or e not in other:
                continue
            f = other[e]
            for j, v in row.items():
                nv = other.get(j, ZERO) - f * v
                if nv:
                    other[j] = nv
                else:
                    del other[j]
            self.rhs[i] -= f * self.rhs[r]
        if e in self.cost:
            f = self.cost[e]
            for j, v in row.items():
                nv = self.cost.get(j, ZERO) - f * v
                if nv:
                    self.cost[j] = nv
                else:
                    del self.cost[j]
            self.value += f * self.rhs[r]
        self.basis[r] = e
        self.pivots += 1

    def run(self, allowed: int, max_pivots: int):
        """Bland's rule on columns < ``allowed``; returns None or the entering column of a ray."""
        while True:
            entering = min((j for j, v in self.cost.items() if v < 0 and j < allowed), default=None)
            if entering is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return entering
            if self.pivots >= max_pivots:
                raise IterationLimitError(f"simplex exceeded {max_pivots} pivots")
            self.pivot(best[1], entering)


def solve_standard(
    a_rows: list[dict[int, Fraction]],
    b: list[Fraction],
    c: list[Fraction],
    max_pivots: int = 100_000,
):
    """min c.x s.t. A x = b, x >= 0 on index-based data.

    Returns ``(status, x, objective, ray, pivots)`` with lists for x and ray.
    """
    n = len(c)
    rows = []
    rhs = []
    for row, bi in zip(a_rows, b):
        row = {j: Fraction(v) for j, v in row.items() if v}
        bi = Fraction(bi)
        if bi < 0:
            row = {j: -v for j, v in row.items()}
            bi = -bi
        rows.append(row)
        rhs.append(bi)
    m = len(rows)
    # reuse unit columns (a single +1 entry) as the starting basis where possible
    col_rows: dict[int, list[int]] = {}
    for i, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, []).append(i)
    basis = [-1] * m
    for j in range(n):
        hits = col_rows.get(j, [])
        if len(hits) == 1 and rows[hits[0]][j] == 1 and basis[hits[0]] == -1:
            basis[hits[0]] = j
    artificial = []
    for i in range(m):
        if basis[i] == -1:
            col = n + len(artificial)
            rows[i][col] = Fraction(1)
            basis[i] = col
            artificial.append(col)
    tab = _Tableau(rows, rhs, basis)

    if artificial:
        tab.set_objective({col: Fraction(1) for col in artificial})
        tab.run(n + len(artificial), max_pivots)
        if tab.value != 0:
            return "infeasible", None, None, None, tab.pivots
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= n:
                j = min((j for j in tab.rows[i] if j < n), default=None)
                if j is None:
                    continue
                tab.pivot(i, j)
            keep.append(i)
        art = set(artificial)
        tab.rows = [{j: v for j, v in tab.rows[i].items() if j not in art} for i in keep]
        tab.rhs = [tab.rhs[i] for i in keep]
        tab.basis = [tab.basis[i] for i in keep]

    tab.set_objective({j: Fraction(v) for j, v in enumerate(c) if v})
    ray_col = tab.run(n, max_pivots)
    x = [ZERO] * n
    for i, j in enumerate(tab.basis):
        x[j] = tab.rhs[i]
    if ray_col is not None:
        ray = [ZERO] * n
        ray[ray_col] = Fraction(1)
        for i, j in enumerate(tab.basis):
            v = tab.rows[i].get(ray_col)
            if v:
                ray[j] = -v
        return "unbounded", x, None, ray, tab.pivots
    return "optimal", x, tab.value, None, tab.pivots


def _index_rows(lp):
    col_pos = {c: j for j, c in enumerate(lp.A.cols)}
    return [{col_pos[c]: v for c, v in lp.A.row(r).items()} for r in lp.A.rows]


def _solve_equations(lp) -> Solution:
    cols = list(lp.A.cols)
    n = len(cols)
    # integer rows: scale each equation by the lcm of its denominators
    mat = []
    for r, row in zip(lp.A.rows, _index_rows(lp)):
        vals = [row.get(j, ZERO) for j in range(n)] + [lp.b[r]]
        den = lcm(*(v.denominator for v in vals)) if vals else 1
        mat.append([int(v * den) for v in vals])
    m = len(mat)
    pivots = []
    prev = 1
    r = 0
    for col in range(n):
        p = next((i for i in range(r, m) if mat[i][col] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n + 1):
                mat[i][j] = (mat[r][col] * mat[i][j] - mat[i][col] * mat[r][j]) // prev
            mat[i][col] = 0
        prev = mat[r][col]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if mat[i][n] != 0:
            return Solution(Status.INFEASIBLE)
    x = [ZERO] * n
    for i in range(len(pivots) - 1, -1, -1):
        col = pivots[i]
        s = Fraction(mat[i][n]) - sum((mat[i][j] * x[j] for j in pivots[i + 1 :]), ZERO)
        x[col] = s / mat[i][col]
    return Solution(Status.FEASIBLE, Vector.from_list(cols, x))


def solve(lp, max_pivots: int = 100_000) -> Solution:
    """Solve a :class:`~colred.lpreduce.LinearProgram` exactly."""
    from .lpreduce import Form

    if lp.A.infinity_count:
        raise DomainError("LP data must be finite")
    cols = list(lp.A.cols)
    n = len(cols)
    if lp.form is Form.EQUATIONS:
        return _solve_equations(lp)
    if not cols and not lp.A.rows:
        return Solution(Status.OPTIMAL, Vector([], {}), ZERO)
    rows = _index_rows(lp)
    b = [lp.b[r] for r in lp.A.rows]
    if lp.form is Form.STANDARD_MIN:
        c = [lp.c[w] for w in cols]
        status, x, obj, ray, piv = solve_standard(rows, b, c, max_pivots)
        if status == "infeasible":
            return Solution(Status.INFEASIBLE, iterations=piv)
        xv = Vector.from_list(cols, x)
        if status == "unbounded":
            return Solution(Status.UNBOUNDED, xv, ray=Vector.from_list(cols, ray), iterations=piv)
        return Solution(Status.OPTIMAL, xv, obj, iterations=piv)
    # dual form: x = x+ - x-, A x+ - A x- + s = b, min -c.x+ + c.x-
    m = len(rows)
    std_rows = []
    for i, row in enumerate(rows):
        new = dict(row)
        new.update({n + j: -v for j, v in row.items()})
        new[2 * n + i] = Fraction(1)
        std_rows.append(new)
    c = [lp.c[w] for w in cols]
    std_c = [-v for v in c] + c + [ZERO] * m
    status, x, obj, ray, piv = solve_standard(std_rows, b, std_c, max_pivots)
    if status == "infeasible":
        return Solution(Status.INFEASIBLE, iterations=piv)
    xv = Vector.from_list(cols, [x[j] - x[n + j] for j in range(n)])
    if status == "unbounded":
        rv = Vector.from_list(cols, [ray[j] - ray[n + j] for j in range(n)])
        return Solution(Status.UNBOUNDED, xv, ray=rv, iterations=piv)
    return Solution(Status.OPTIMAL, xv, -obj, iterations=piv)


def check_feasible(lp, x: Vector) -> CheckResult:
    """Exact constraint check; the witness names the first violated constraint."""
    from .lpreduce import Form

    if set(x.ids) != set(lp.A.cols):
        raise DomainError("solution is not indexed by the LP variables")
    if lp.form is Form.STANDARD_MIN:
        for w in lp.A.cols:
            if x[w] < 0:
                return CheckResult(False, ("bound", w, x[w], ZERO))
    for r in lp.A.rows:
        lhs = sum((v * x[c] for c, v in lp.A.row(r).items()), ZERO)
        rhs = lp.b[r]
        if lp.form is Form.DUAL_MAX:
            if lhs > rhs:
                return CheckResult(False, ("row", r, lhs, rhs))
        elif lhs != rhs:
            return CheckResult(False, ("row", r, lhs, rhs))
    return CheckResult(True)


def format_solution(sol: Solution) -> str:
    from .formats import format_value

    out = [f"status {sol.status.value}"]
    if sol.objective is not None:
        out.append(f"objective {format_value(sol.objective)}")
    if sol.x is not None:
        out.extend(f"x {k} {format_value(v)}" for k, v in sol.x.items())
    if sol.ray is not None:
        out.extend(f"ray {k} {format_value(v)}" for k, v in sol.ray.items())
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> Solution:
    from .formats import ParseError, parse_value

    status = None
    objective = None
    xs: dict = {}
    rays: dict = {}
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks:
            continue
        if toks[0] == "status" and len(toks) == 2:
            try:
                status = Status(toks[1])
            except ValueError as exc:
                raise ParseError(f"unknown status {toks[1]!r}", no) from exc
        elif toks[0] == "objective" and len(toks) == 2:
            objective = parse_value(toks[1], no)
        elif toks[0] in ("x", "ray") and len(toks) == 3:
            (xs if toks[0] == "x" else rays)[toks[1]] = parse_value(toks[2], no)
        else:
            raise ParseError("unrecognised solution line", no)
    if status is None:
        raise ParseError("missing status line")
    x = Vector(list(xs), xs) if xs or status in (Status.OPTIMAL, Status.FEASIBLE) else None
    ray = Vector(list(rays), rays) if rays else None
    return Solution(status, x, objective, ray)
