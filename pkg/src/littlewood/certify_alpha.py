"""Smale alpha-theory certificates in exact rational arithmetic.

For a square polynomial system ``F`` with degrees ``d_i`` (``D = max d_i``)
and a point ``x`` the certificate bounds

* ``beta  = ||DF(x)^-1 F(x)||_2`` (the Newton step length),
* ``gamma <= mu(F, x) * D**1.5 / (2 * ||x||_1)`` with
  ``mu(F, x) = max(1, ||F|| * ||DF(x)^-1 Delta(x)||)``, where
  ``||x||_1 = sqrt(1 + ||x||^2)``, ``Delta(x) = diag(sqrt(d_i) ||x||_1**(d_i - 1))``,
  ``||F||`` is the Bombieri-Weyl norm and the operator norm is bounded by the
  Frobenius norm,
* ``alpha = beta * gamma``.

``x`` is an approximate solution (Newton converges quadratically from it to
a nearby root) when ``alpha <= (13 - 3*sqrt(17)) / 4``.  Every square root is
replaced by a rational upper (or, in a denominator, lower) bound, so the
reported numbers are rigorous upper bounds and the threshold test never
touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt
from typing import Sequence

from .errors import SingularJacobian
from .polysys import PolynomialSystem, SparsePolynomial

THRESHOLD_TEXT = "(13 - 3*sqrt(17))/4"
THRESHOLD_FLOAT = (13 - 3 * math.sqrt(17)) / 4
GAMMA_BOUND_TEXT = (
    "gamma <= max(1, ||F||_BW * ||DF(x)^-1 Delta(x)||_F) * D^(3/2) / (2 sqrt(1 + ||x||^2))"
)
SQRT_BITS = 64


@dataclass
class AlphaReport:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    certified_approximate: bool
    certified_real: bool = False
    isolated: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def num(q: Fraction) -> dict:
            return {"exact": str(q), "decimal": f"{float(q):.6e}"}

        return {
            "alpha": num(self.alpha),
            "beta": num(self.beta),
            "gamma": num(self.gamma),
            "threshold": THRESHOLD_TEXT,
            "threshold_check": self.certified_approximate,
            "real": self.certified_real,
            "isolated": self.isolated,
            "gamma_bound": GAMMA_BOUND_TEXT,
            "notes": list(self.notes),
        }


def sqrt_upper(q: Fraction, bits: int = SQRT_BITS) -> Fraction:
    """Rational ``s >= sqrt(q)`` with relative excess below ``2**-bits``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    if q == 0:
        return Fraction(0)
    p, r = q.numerator, q.denominator
    n = p * r
    k = max(0, bits + 2 - n.bit_length() // 2)
    scaled = n << (2 * k)
    s = isqrt(scaled)
    if s * s != scaled:
        s += 1
    return Fraction(s, r << k)


def sqrt_lower(q: Fraction, bits: int = SQRT_BITS) -> Fraction:
    """Rational ``s <= sqrt(q)`` with relative deficit below ``2**-bits``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    if q == 0:
        return Fraction(0)
    p, r = q.numerator, q.denominator
    n = p * r
    k = max(0, bits + 2 - n.bit_length() // 2)
    return Fraction(isqrt(n << (2 * k)), r << k)


def below_threshold(alpha: Fraction) -> bool:
    """``alpha <= (13 - 3 sqrt 17)/4`` decided in integers.

    Equivalent to ``13 - 4 alpha >= 3 sqrt 17``: the left side must be
    nonnegative, and then both sides may be squared.
    """
    lhs = 13 - 4 * Fraction(alpha)
    return lhs >= 0 and lhs * lhs >= 153


def bombieri_weyl_norm_sq(p: SparsePolynomial, degree: int | None = None) -> Fraction:
    """Squared Bombieri-Weyl norm of ``p`` homogenized to ``degree``."""
    d = p.total_degree if degree is None else degree
    total = Fraction(0)
    for e, c in p.terms.items():
        weight = Fraction(factorial(d - sum(e)), factorial(d))
        for k in e:
            weight *= factorial(k)
        total += Fraction(c) ** 2 * weight
    return total


def exact_inverse(A: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals; raises SingularJacobian."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            raise SingularJacobian("Jacobian is singular at the candidate point")
        M[c], M[pivot] = M[pivot], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            f = M[r][c]
            if r != c and f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def _rational_point(x: Sequence) -> list[Fraction]:
    out = []
    for v in x:
        if isinstance(v, complex):
            raise TypeError("alpha certification here takes real rational points only")
        out.append(Fraction(v))
    return out


def alpha_beta_gamma(sys: PolynomialSystem, x: Sequence) -> AlphaReport:
    """Rigorous upper bounds on alpha, beta and gamma at the rational point ``x``."""
    if not sys.is_square:
        raise ValueError("alpha certification needs a square system")
    xq = _rational_point(x)
    F = [Fraction(v) for v in sys.evaluate(xq)]
    J = sys.jacobian_at(xq)
    Jinv = exact_inverse(J)
    n = len(xq)

    step = [sum((Jinv[i][k] * F[k] for k in range(n)), Fraction(0)) for i in range(n)]
    beta = sqrt_upper(sum((s * s for s in step), Fraction(0)))

    degrees = sys.degrees
    D = max(degrees)
    norm1_sq = 1 + sum((v * v for v in xq), Fraction(0))
    weights = [d * norm1_sq ** (d - 1) for d in degrees]
    frob_sq = sum((Jinv[i][j] ** 2 * weights[j] for i in range(n) for j in range(n)), Fraction(0))
    norm_f_sq = sum((bombieri_weyl_norm_sq(p, d) for p, d in zip(sys, degrees)), Fraction(0))
    mu = max(Fraction(1), sqrt_upper(norm_f_sq) * sqrt_upper(frob_sq))
    gamma = mu * D * sqrt_upper(Fraction(D)) / (2 * sqrt_lower(norm1_sq))

    alpha = beta * gamma
    ok = below_threshold(alpha)
    report = AlphaReport(alpha, beta, gamma, ok, isolated=ok)
    report.notes.append(f"gamma bound: {GAMMA_BOUND_TEXT}")
    if ok:
        report.notes.append("alpha below threshold: Newton converges quadratically to a nonsingular, hence isolated, root")
    return report


def certify_real(sys: PolynomialSystem, report: AlphaReport, x: Sequence) -> bool:
    """Realness of the root attached to a certified real point.

    For real coefficients and a real start, every Newton iterate is real, so
    the limit root is real; with a certified approximate solution this is
    exactly the certificate.  Complex points are outside this entry point.
    """
    if any(isinstance(v, complex) for v in x):
        raise ValueError("certify_real takes real points; complex candidates are not supported")
    for p in sys:
        for c in p.terms.values():
            if not isinstance(c, (int, Fraction)):
                raise ValueError("certify_real needs a system with rational coefficients")
    report.certified_real = bool(report.certified_approximate)
    if report.certified_real:
        report.notes.append("real: real system and real start, so all Newton iterates and their limit are real")
    else:
        report.notes.append("real: not certified (point is not a certified approximate solution)")
    return report.certified_real


def certify(sys: PolynomialSystem, x: Sequence) -> AlphaReport:
    """``alpha_beta_gamma`` followed by ``certify_real``."""
    report = alpha_beta_gamma(sys, x)
    certify_real(sys, report, x)
    return report
