from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from littlewood.errors import DimensionMismatch, UnknownVariable
from littlewood.fixtures import fixture_floats, fixture_rationals
from littlewood.polysys import (
    GENERIC_VARIABLES,
    LITTLEWOOD_VARIABLES,
    PolynomialSystem,
    SparsePolynomial,
    build_generic_distance_polynomial,
    build_littlewood_system,
    jacobian,
    littlewood_pairs,
    pair_polynomial,
    parse_polynomial,
    substitute,
)

DATA = Path(__file__).parent / "data"

# Frozen expansions of the (1, j) and (2, j) touching conditions at j = 3.
LINE1_LINE3 = (
    "y3^2*t3^2 + 2*y3^2*t3*u3 - 2*y3^2*t3 + y3^2*u3^2 - 2*y3^2*u3 + y3^2 + 2*y3*t3*u3"
    " + 2*y3*u3^2 - 2*y3*u3 - 4*t3^2 - 8*t3*u3 + 8*t3 - 7*u3^2 + 8*u3 - 4"
)
LINE2_LINE3 = (
    "x3^2*t3^2 + 2*x3^2*t3*u3 - 2*x3^2*t3 + x3^2*u3^2 - 2*x3^2*u3 + x3^2 - 2*x3*t3*u3"
    " - 2*x3*t3^2 + 2*x3*t3 - 4*u3^2 - 8*t3*u3 + 8*t3 - 7*t3^2 + 8*u3 - 4"
)

XY = ("x", "y", "z")
small_coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomial = st.tuples(*(st.integers(0, 3) for _ in XY))
polys = st.dictionaries(monomial, small_coef, max_size=6).map(lambda t: SparsePolynomial(XY, t))
SYSTEM = build_littlewood_system()
points = st.tuples(*(st.fractions(min_value=-3, max_value=3, max_denominator=11) for _ in XY))


# -- construction -----------------------------------------------------------


def test_generic_polynomial_shape():
    p = build_generic_distance_polynomial()
    assert p.variables == GENERIC_VARIABLES
    assert p.total_degree == 6
    assert len(p) == 84


def test_generic_polynomial_vanishes_on_fixed_pair():
    p = build_generic_distance_polynomial()
    point = {"xi": 0, "yi": 0, "zi": -1, "ti": 1, "ui": 0, "vi": 0,
             "xj": 0, "yj": 0, "zj": 1, "tj": 0, "uj": 1, "vj": 0}
    assert p.evaluate([point[v] for v in p.variables]) == 0


def test_pair_with_first_fixed_axis_matches_printed_form():
    assert pair_polynomial(1, 3) == parse_polynomial(LINE1_LINE3, ("x3", "y3", "t3", "u3"))


def test_pair_with_second_fixed_axis_matches_printed_form():
    assert pair_polynomial(2, 3) == parse_polynomial(LINE2_LINE3, ("x3", "y3", "t3", "u3"))


def test_free_pair_matches_printed_form():
    q = pair_polynomial(3, 4)
    local = ("xi", "yi", "ti", "ui", "xj", "yj", "tj", "uj")
    renamed = q.rename(dict(zip(q.variables, local)))
    printed = parse_polynomial((DATA / "eq10_printed.txt").read_text(), local)
    assert renamed == printed
    assert len(q) == 137


def test_spot_coefficients():
    p1 = pair_polynomial(1, 5)
    assert p1.coefficient({"y5": 2, "t5": 2}) == 1
    assert p1.coefficient({}) == -4
    q = pair_polynomial(4, 6)
    assert q.coefficient({"t4": 1, "u4": 1, "t6": 1, "u6": 1}) == 24
    assert q.coefficient({"t4": 2, "u6": 2}) == -12


def test_system_shape(littlewood):
    assert len(littlewood) == 20
    assert littlewood.variables == LITTLEWOOD_VARIABLES
    assert littlewood.is_square
    used = set().union(*(p.used_variables() for p in littlewood))
    assert used == set(LITTLEWOOD_VARIABLES)
    assert littlewood_pairs()[:2] == [(1, 3), (1, 4)] and len(littlewood_pairs()) == 20


def test_system_is_deterministic(littlewood):
    assert build_littlewood_system() == littlewood


@pytest.mark.parametrize("i,j", [(3, 4), (3, 7), (5, 6)])
def test_free_pair_symmetric_under_block_swap(i, j):
    p = pair_polynomial(i, j)
    swap = {f"{c}{i}": f"{c}{j}" for c in "xytu"} | {f"{c}{j}": f"{c}{i}" for c in "xytu"}
    assert p.rename(swap).embed(p.variables) == p


def test_fixed_pairs_equal_direct_substitution():
    generic = build_generic_distance_polynomial()
    bind = {"xi": 0, "yi": 0, "zi": -1, "ti": 1, "ui": 0, "vi": 0, "zj": 0, "vj": "1 - tj - uj"}
    direct = generic.substitute(bind).rename({"xj": "x3", "yj": "y3", "tj": "t3", "uj": "u3"})
    assert direct.embed(("x3", "y3", "t3", "u3")) == pair_polynomial(1, 3)


# -- operations -------------------------------------------------------------


def test_substitute_examples():
    x, y = SparsePolynomial.generators(("x", "y"))
    assert substitute(x * y + y, {"x": 0}) == SparsePolynomial.variable("y", ("y",))
    t, u, v = SparsePolynomial.generators(("t", "u", "v"))
    expanded = substitute(v ** 2, {"v": "1 - t - u"})
    assert expanded == parse_polynomial("1 - 2*t - 2*u + t^2 + 2*t*u + u^2", ("t", "u"))


def test_substitute_unknown_variable():
    x, y = SparsePolynomial.generators(("x", "y"))
    with pytest.raises(UnknownVariable):
        substitute(x + y, {"w": 1})


def test_derivative_example():
    x, y = SparsePolynomial.generators(("x", "y"))
    assert (x ** 2 * y).diff("x") == 2 * x * y


def test_jacobian_shape(littlewood):
    J = jacobian(littlewood)
    assert len(J) == 20 and all(len(row) == 20 for row in J)


def test_evaluate_dimension_mismatch(littlewood):
    with pytest.raises(DimensionMismatch):
        littlewood.evaluate([0.0] * 19)


def test_zero_system_evaluates_to_zero():
    zero = PolynomialSystem([SparsePolynomial(("a", "b"))] * 2, ("a", "b"))
    assert list(zero.evaluate([1.5, -2.0])) == [0.0, 0.0]


def test_line1_instance_at_hand_point():
    p = pair_polynomial(1, 3)
    assert p.evaluate([Fraction(7), Fraction(0), Fraction(1), Fraction(0)]) == 0


@pytest.mark.parametrize("name", ["first", "second"])
def test_fixture_residual_exact_and_float(littlewood, name):
    exact = littlewood.evaluate(fixture_rationals(name))
    assert max(abs(v) for v in exact) < Fraction(1, 10**8)
    floats = littlewood.evaluate(fixture_floats(name))
    assert np.max(np.abs(floats - np.array([float(v) for v in exact]))) < 1e-12


def test_no_zero_coefficients_stored():
    x, y = SparsePolynomial.generators(("x", "y"))
    assert len((x + y) - y) == 1
    assert ((x - x) * y).is_zero()


# -- properties -------------------------------------------------------------


@given(polys, polys, points)
def test_ring_laws_evaluate_exactly(p, q, pt):
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)


@given(polys, polys, points)
def test_substitute_then_evaluate_composes(p, q, pt):
    composed = p.substitute({"x": q})
    remaining = dict(zip(XY, pt))
    value_q = q.evaluate(pt)
    expected = p.evaluate([value_q, remaining["y"], remaining["z"]])
    got = composed.evaluate([remaining[v] for v in composed.variables])
    assert got == expected


@given(polys)
def test_text_and_json_round_trip(p):
    sys = PolynomialSystem([p, p * p], XY)
    assert PolynomialSystem.loads(sys.dumps("text")) == sys
    assert PolynomialSystem.loads(sys.dumps("json")) == sys


def test_littlewood_round_trip(littlewood):
    for fmt in ("text", "json"):
        assert PolynomialSystem.loads(littlewood.dumps(fmt), fmt) == littlewood


@given(st.lists(st.floats(-3, 3), min_size=20, max_size=20))
def test_jacobian_matches_finite_differences(pt):
    sys = SYSTEM
    x = np.array(pt)
    J = sys.jacobian_at(x)
    h = 1e-6
    for k in (0, 7, 13, 19):
        e = np.zeros(20)
        e[k] = h
        fd = (sys.evaluate(x + e) - sys.evaluate(x - e)) / (2 * h)
        scale = max(1.0, np.max(np.abs(J[:, k])))
        assert np.max(np.abs(fd - J[:, k])) <= 1e-6 * scale * 10


@given(polys, points)
def test_float_evaluation_tracks_exact(p, pt):
    exact = p.evaluate(pt)
    approx = p.evaluate([float(v) for v in pt])
    assert abs(approx - float(exact)) <= 1e-9 * (1 + abs(float(exact)))
