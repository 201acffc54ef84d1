"""Value-function LPs for the n x n gridworld.

States are the cells ``s<r>_<c>``, actions the four moves. A move into the
border leaves the agent where it is. The LP is

    max  sum_i x_i   s.t.  x_i - gamma * sum_j p(i, k, j) x_j <= R(i)

with one row per state and action, so ``n*n`` variables and ``4*n*n`` rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .matcore import DomainError, SparseMatrix, Vector, to_ext

__all__ = ["ACTIONS", "GridworldSpec", "state_label", "corner_rewards", "gridworld_lp"]

ACTIONS = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}


def state_label(r: int, c: int) -> str:
    return f"s{r}_{c}"


def corner_rewards(n: int) -> dict[tuple[int, int], Fraction]:
    return {(r, c): Fraction(1) for r in (0, n - 1) for c in (0, n - 1)}


@dataclass(frozen=True)
class GridworldSpec:
    """``success`` is the chance that a move goes where intended; the rest is
    shared evenly by the other three moves."""

    n: int
    gamma: Fraction
    rewards: Mapping[tuple[int, int], Fraction] = field(default=None)
    success: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("grid side must be positive")
        gamma = to_ext(self.gamma)
        if not 0 < gamma < 1:
            raise DomainError("gamma must lie strictly between 0 and 1")
        success = to_ext(self.success)
        if not 0 <= success <= 1:
            raise DomainError("success probability must lie in [0, 1]")
        rewards = corner_rewards(self.n) if self.rewards is None else dict(self.rewards)
        for (r, c), v in rewards.items():
            if not (0 <= r < self.n and 0 <= c < self.n):
                raise DomainError(f"reward outside the grid at {(r, c)}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "success", success)
        object.__setattr__(self, "rewards", {k: to_ext(v) for k, v in rewards.items()})

    def step(self, r: int, c: int, move: str) -> tuple[int, int]:
        dr, dc = ACTIONS[move]
        nr, nc = r + dr, c + dc
        if 0 <= nr < self.n and 0 <= nc < self.n:
            return nr, nc
        return r, c

    def transitions(self, r: int, c: int, action: str) -> dict[tuple[int, int], Fraction]:
        probs: dict[tuple[int, int], Fraction] = {}
        slip = (1 - self.success) / 3
        for move in ACTIONS:
            p = self.success if move == action else slip
            if p:
                t = self.step(r, c, move)
                probs[t] = probs.get(t, 0) + p
        assert sum(probs.values()) == 1
        return probs


def gridworld_lp(spec: GridworldSpec):
    from .lpreduce import Form, LinearProgram

    n = spec.n
    cols = [state_label(r, c) for r in range(n) for c in range(n)]
    rows, entries, rhs = [], {}, {}
    for r in range(n):
        for c in range(n):
            s = state_label(r, c)
            for action in ACTIONS:
                row = f"{s}:{action}"
                rows.append(row)
                coeff = {s: Fraction(1)}
                for (tr, tc), p in spec.transitions(r, c, action).items():
                    t = state_label(tr, tc)
                    coeff[t] = coeff.get(t, 0) - spec.gamma * p
                for t, v in coeff.items():
                    if v:
                        entries[(row, t)] = v
                rhs[row] = spec.rewards.get((r, c), Fraction(0))
    return LinearProgram(
        Form.DUAL_MAX,
        SparseMatrix(rows, cols, entries),
        Vector(rows, rhs),
        Vector(cols, {s: Fraction(1) for s in cols}),
    )

