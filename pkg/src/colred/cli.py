"""Command-line front end.

Exit codes: 0 success (or optimal / feasible), 1 not isomorphic, 2 bad input,
3 internal invariant violation, 4 infeasible, 5 unbounded.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from .formats import ParseError, read_matrix, read_partition, write_partition
from .fracauto import check_fractional_isomorphism, format_verdict
from .gridworld import GridworldSpec, corner_rewards, gridworld_lp
from .lpreduce import ReductionInvariantError, dump_lp, read_lp, reduce, solve_via_reduction, write_bundle
from .lpsolve import Status, format_solution, solve
from .matcore import DomainError, to_ext
from .refine import coarsest_equitable

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_INVARIANT, EXIT_INFEASIBLE, EXIT_UNBOUNDED = 0, 1, 2, 3, 4, 5

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.FEASIBLE: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.UNBOUNDED: EXIT_UNBOUNDED,
}


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_refine(args) -> int:
    a = read_matrix(args.matrix)
    init_rows = read_partition(args.init_rows, a.rows) if args.init_rows else None
    init_cols = read_partition(args.init_cols, a.cols) if args.init_cols else None
    t0 = time.perf_counter()
    res = coarsest_equitable(a, init_rows, init_cols)
    ms = (time.perf_counter() - t0) * 1000
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_partition(out / "rows.part", res.rows)
    write_partition(out / "cols.part", res.cols)
    print(f"classes: {len(res.rows)} {len(res.cols)} rounds: {res.rounds} time_ms: {ms:.1f}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    lp = read_lp(args.lp)
    r = reduce(lp, iterate=args.iterate)
    if args.out:
        write_bundle(args.out, r)
    (m, n), (m2, n2) = lp.shape, r.reduced.shape
    print(f"original: {m} rows {n} cols")
    print(f"reduced: {m2} rows {n2} cols")
    print(f"steps: {len(r.chain)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    lp = read_lp(args.lp)
    if args.via_reduction:
        sol, _ = solve_via_reduction(lp)
    else:
        sol = solve(lp)
    _emit(format_solution(sol), args.out)
    return _STATUS_EXIT[sol.status]


def cmd_check_iso(args) -> int:
    a1, a2 = read_matrix(args.matrix1), read_matrix(args.matrix2)
    verdict = check_fractional_isomorphism(a1, a2)
    _emit(format_verdict(verdict), args.out)
    return EXIT_OK if verdict.isomorphic else EXIT_NO


def parse_goals(text: str, n: int) -> dict[tuple[int, int], Fraction]:
    """``corners`` or a ``;``-separated list of ``r,c`` or ``r,c=reward`` cells."""
    if text == "corners":
        return corner_rewards(n)
    goals = {}
    for item in filter(None, (t.strip() for t in text.split(";"))):
        cell, _, reward = item.partition("=")
        try:
            r, c = (int(t) for t in cell.split(","))
            goals[(r, c)] = to_ext(reward) if reward else Fraction(1)
        except (ValueError, TypeError):
            raise UsageError(f"bad goal {item!r}; expected r,c or r,c=value") from None
    return goals


def cmd_gen_gridworld(args) -> int:
    try:
        gamma = to_ext(args.gamma)
        success = to_ext(args.success)
    except (ValueError, ZeroDivisionError):
        raise UsageError("gamma and success must be rationals such as 9/10") from None
    spec = GridworldSpec(args.n, gamma, parse_goals(args.goals, args.n), success)
    _emit(dump_lp(gridworld_lp(spec)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="colred", description="Equitable partitions and LP reduction.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("refine", help="coarsest equitable partition of a matrix")
    s.add_argument("matrix")
    s.add_argument("--init-rows", help="initial row partition file")
    s.add_argument("--init-cols", help="initial column partition file")
    s.add_argument("--out", default=".", help="directory for rows.part and cols.part")
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("reduce", help="reduce an LP (native format or .mps)")
    s.add_argument("lp")
    s.add_argument("--iterate", action="store_true", help="factor until nothing shrinks")
    s.add_argument("--out", help="directory for the reduced LP, chain and lift map")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="solve an LP exactly")
    s.add_argument("lp")
    s.add_argument("--via-reduction", action="store_true", help="reduce, solve and lift back")
    s.add_argument("--out", help="solution file (default: stdout)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("check-iso", help="test two matrices for fractional isomorphism")
    s.add_argument("matrix1")
    s.add_argument("matrix2")
    s.add_argument("--out", help="verdict file (default: stdout)")
    s.set_defaults(func=cmd_check_iso)

    s = sub.add_parser("gen-gridworld", help="write the gridworld value-function LP")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--gamma", required=True, help="discount, e.g. 9/10")
    s.add_argument("--goals", default="corners", help="'corners' or 'r,c[=reward];...'")
    s.add_argument("--success", default="1", help="probability that a move works as intended")
    s.add_argument("--out", help="LP file (default: stdout)")
    s.set_defaults(func=cmd_gen_gridworld)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ReductionInvariantError, AssertionError) as exc:
        print(f"colred: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ParseError, DomainError, UsageError, ValueError, OSError) as exc:
        print(f"colred: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
