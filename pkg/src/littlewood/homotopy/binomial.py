"""Closed-form solutions of binomial systems via the Hermite normal form."""

from __future__ import annotations

import cmath
from typing import Sequence

import numpy as np

from ..errors import SingularCell
from .cells import MixedCell, integer_det


def hermite_form(V: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular ``U`` and upper-triangular ``H`` with ``U V = H`` (integer row operations)."""
    H = [list(map(int, row)) for row in V]
    n = len(H)
    m = len(H[0]) if H else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(r: int, s: int, q: int):
        # row_r -= q * row_s
        H[r] = [a - q * b for a, b in zip(H[r], H[s])]
        U[r] = [a - q * b for a, b in zip(U[r], U[s])]

    row = 0
    for col in range(m):
        if row >= n:
            break
        while True:
            nonzero = [r for r in range(row, n) if H[r][col] != 0]
            if not nonzero:
                break
            piv = min(nonzero, key=lambda r: abs(H[r][col]))
            H[row], H[piv] = H[piv], H[row]
            U[row], U[piv] = U[piv], U[row]
            done = True
            for r in range(row + 1, n):
                if H[r][col]:
                    combine(r, row, H[r][col] // H[row][col])
                    if H[r][col]:
                        done = False
            if done:
                break
        if any(H[r][col] for r in range(row, n)):
            row += 1
    return U, H


def solve_binomial(V: Sequence[Sequence[int]], rhs: Sequence[complex]) -> list[np.ndarray]:
    """All solutions in the torus of ``x^{V_j} = rhs_j`` (row ``V_j`` is an exponent vector).

    There are exactly ``|det V|`` of them.
    """
    n = len(V)
    if integer_det(V) == 0:
        raise SingularCell("exponent difference matrix is singular")
    U, H = hermite_form(V)
    logs = [cmath.log(complex(b)) for b in rhs]
    # x^{H_i} = prod_j rhs_j^{U_ij}
    targets = [sum(U[i][j] * logs[j] for j in range(n)) for i in range(n)]
    partial: list[list[complex]] = [[]]
    for i in range(n - 1, -1, -1):
        nxt = []
        d = H[i][i]
        for tail in partial:
            # tail holds x_{i+1}..x_{n-1}
            known = sum(H[i][k] * cmath.log(tail[k - i - 1]) for k in range(i + 1, n))
            base = (targets[i] - known) / d
            for m in range(abs(d)):
                nxt.append([cmath.exp(base + 2j * cmath.pi * m / d)] + tail)
        partial = nxt
    return [np.array(p, dtype=complex) for p in partial]


def binomial_start_solutions(cell: MixedCell, coefficients: Sequence[tuple[complex, complex]]) -> list[np.ndarray]:
    """Roots of ``c_j1 x^{a_j1} + c_j2 x^{a_j2} = 0`` for the cell's pairs.

    ``coefficients[j]`` holds the two (random) coefficients attached to the
    j-th pair, in pair order.
    """
    V = cell.difference_matrix
    rhs = [-c2 / c1 for c1, c2 in coefficients]
    return solve_binomial(V, rhs)
