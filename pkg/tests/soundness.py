"""Containment soundness sampling shared by the interval tests and the acceptance suite."""

from fractions import Fraction

import math

import numpy as np

from littlewood.interval import Interval, interval_eval, rounding
from littlewood.polysys import SparsePolynomial, pair_polynomial


def _random_poly(rng, variables, n_terms, max_deg):
    terms = {}
    for _ in range(n_terms):
        e = tuple(int(v) for v in rng.integers(0, max_deg + 1, len(variables)))
        if sum(e) <= max_deg:
            terms[e] = Fraction(int(rng.integers(-9, 10)), int(rng.choice([1, 3, 7, 1024])))
    return SparsePolynomial(variables, terms)


def polynomial_classes(seed: int = 0) -> dict[str, SparsePolynomial]:
    rng = np.random.default_rng(seed)
    return {
        "univariate_deg7": _random_poly(rng, ("x",), 8, 7),
        "trivariate_sparse": _random_poly(rng, ("x", "y", "z"), 10, 5),
        "touching_pair": pair_polynomial(3, 4),
    }


def exact_value(p: SparsePolynomial, point) -> Fraction:
    """Exact value at a float point via integer arithmetic (floats are dyadic rationals)."""
    fracs = [Fraction(float(v)) for v in point]
    k = max(f.denominator for f in fracs).bit_length() - 1
    X = [f.numerator << (k - (f.denominator.bit_length() - 1)) for f in fracs]
    d = p.total_degree
    q = math.lcm(*(Fraction(c).denominator for c in p.terms.values()))
    total = 0
    for e, c in p.terms.items():
        c = Fraction(c)
        term = c.numerator * (q // c.denominator)
        for xi, n in zip(X, e):
            if n:
                term *= xi ** n
        total += term << (k * (d - sum(e)))
    return Fraction(total, q << (k * d))


def containment_violations(p: SparsePolynomial, mode: str, samples: int = 10_000,
                           boxes: int = 40, seed: int = 1) -> int:
    """Exact values at random points of random boxes that escape the enclosure."""
    rng = np.random.default_rng(seed)
    per_box = samples // boxes
    bad = 0
    for _ in range(boxes):
        center = rng.uniform(-3, 3, p.nvars)
        radius = 10.0 ** rng.uniform(-9, 0)
        comps = [Interval(c - radius, c + radius) for c in center]
        with rounding(mode):
            enclosure = interval_eval(p, comps)
        pts = rng.uniform(center - radius, center + radius, (per_box, p.nvars))
        for pt in pts:
            value = exact_value(p, pt)
            if value not in enclosure:
                bad += 1
    return bad
