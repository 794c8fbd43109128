"""Mixed-cell enumeration by depth-first search with LP feasibility pruning."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from ..errors import DegenerateLifting
from ..polysys import Exponent
from .lifting import LiftedSupport

FEASIBILITY_TOL = 1e-9


def integer_det(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss fraction-free elimination)."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True)
class MixedCell:
    """One monomial pair per equation plus the inner normal ``alpha`` (lifted: ``(alpha, 1)``)."""

    pairs: tuple[tuple[Exponent, Exponent], ...]
    inner_normal: tuple[float, ...]

    @property
    def difference_matrix(self) -> list[list[int]]:
        return [[p - q for p, q in zip(a, b)] for a, b in self.pairs]

    @property
    def volume(self) -> int:
        """``|det(a_j1 - a_j2)_j|``, the number of start solutions of the cell."""
        return abs(integer_det(self.difference_matrix))

    def minima(self, lifted: Sequence[LiftedSupport]) -> list[float]:
        """Per-equation minimum of the lifted inner products (attained on the pair)."""
        return [ls.lifted_value(a, self.inner_normal) for ls, (a, _) in zip(lifted, self.pairs)]

    def check(self, lifted: Sequence[LiftedSupport], tol: float = FEASIBILITY_TOL) -> bool:
        """Re-verify the cell inequalities by direct substitution of the inner normal."""
        for ls, (a, b) in zip(lifted, self.pairs):
            va, vb = ls.lifted_value(a, self.inner_normal), ls.lifted_value(b, self.inner_normal)
            scale = 1.0 + abs(va)
            if abs(va - vb) > tol * scale:
                return False
            for c in ls.support:
                if c not in (a, b) and not ls.lifted_value(c, self.inner_normal) > va + tol * scale:
                    return False
        return True


def _slack_lp(chosen: list[tuple[LiftedSupport, Exponent, Exponent]], n: int) -> tuple[str, float]:
    """Maximize the common slack of the mixed-cell inequalities of a partial choice."""
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for ls, a, b in chosen:
        w = ls.lifting
        A_eq.append([p - q for p, q in zip(a, b)] + [0.0])
        b_eq.append(w[b] - w[a])
        for c in ls.support:
            if c == a or c == b:
                continue
            A_ub.append([-(p - q) for p, q in zip(c, a)] + [1.0])
            b_ub.append(w[c] - w[a])
    cost = [0.0] * n + [-1.0]
    bounds = [(None, None)] * n + [(None, 1.0)]
    res = linprog(cost, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return "infeasible", -np.inf
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return "optimal", float(-res.fun)


def enumerate_mixed_cells(lifted: Sequence[LiftedSupport], tol: float = FEASIBILITY_TOL) -> list[MixedCell]:
    """All fine mixed cells of the lifted supports (one pair per support).

    Raises DegenerateLifting when the best common slack of some candidate is
    within ``tol`` of zero, i.e. a tie prevents strict inequalities.
    """
    n = len(lifted)
    if any(len(a) != n for ls in lifted for a in ls.support):
        raise ValueError("number of supports must equal the ambient dimension")
    cells: list[MixedCell] = []
    candidates = [list(combinations(ls.support, 2)) for ls in lifted]

    def search(level: int, chosen: list):
        if level == n:
            cells.append(_finish(chosen, tol))
            return
        for a, b in candidates[level]:
            trial = chosen + [(lifted[level], a, b)]
            status, slack = _slack_lp(trial, n)
            if status == "infeasible" or slack < -tol:
                continue
            if slack <= tol:
                raise DegenerateLifting(f"slack {slack:.3e} at level {level}: lifting is not generic")
            search(level + 1, trial)

    search(0, [])
    return cells


def _finish(chosen, tol) -> MixedCell:
    pairs = tuple((a, b) for _, a, b in chosen)
    V = np.array([[p - q for p, q in zip(a, b)] for a, b in pairs], dtype=float)
    rhs = np.array([ls.lifting[b] - ls.lifting[a] for ls, a, b in chosen])
    if integer_det(V.astype(int).tolist()) == 0:
        raise DegenerateLifting("feasible pair collection with a singular difference matrix")
    alpha = np.linalg.solve(V, rhs)
    cell = MixedCell(pairs, tuple(float(v) for v in alpha))
    if not cell.check([ls for ls, _, _ in chosen], tol):
        raise DegenerateLifting("inner normal fails its own inequalities after the final solve")
    return cell


def mixed_volume(cells: Sequence[MixedCell]) -> int:
    """Sum of cell volumes: the BKK root count of the system."""
    return sum(c.volume for c in cells)
