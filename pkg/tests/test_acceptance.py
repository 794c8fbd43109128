"""Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines.
"""

import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conftest import TOY_ROOTS
from littlewood.certify_alpha import alpha_beta_gamma, certify
from littlewood.cli import EXIT_OK, EXIT_USAGE, main
from littlewood.fixtures import (
    PUBLISHED_ALPHA,
    PUBLISHED_CONDITION_BOUND,
    PUBLISHED_RADIUS,
    fixture_floats,
    fixture_rationals,
    truncated_fixture,
)
from littlewood.geometry import decode_solution, pairwise_distances, shared_angles
from littlewood.homotopy import filter_real, solve_system
from littlewood.interval import ROUNDING_MODES, krawczyk_verify
from littlewood.polysys import build_generic_distance_polynomial, build_littlewood_system, pair_polynomial
from littlewood.refine import condition_number, newton_refine, residual_inf_norm
from soundness import containment_violations, polynomial_classes

NAMES = ("first", "second")


@contextmanager
def criterion(number, title, budget, pytestconfig):
    """Time the body, print a PASS/FAIL line and fail the test if over budget."""
    start = time.perf_counter()
    outcome = "FAIL"
    try:
        yield
        outcome = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        over = budget is not None and elapsed > budget
        if over:
            outcome = "FAIL"
        limit = f"< {budget:g} s" if budget else "no limit"
        line = f"[{outcome}] criterion {number}: {title} ({elapsed:.2f} s, budget {limit})"
        with pytestconfig.pluginmanager.getplugin("capturemanager").global_and_fixture_disabled():
            print(line)
    assert not over, f"criterion {number} exceeded its {budget} s budget ({elapsed:.2f} s)"


def test_criterion_1_system_reconstruction(pytestconfig, capsys):
    with criterion(1, "system reconstruction", 1.0, pytestconfig):
        assert main(["generate", "--format", "json"]) == EXIT_OK
        capsys.readouterr()
        sys = build_littlewood_system()
        assert len(sys) == 20 and sys.nvars == 20
        generic = build_generic_distance_polynomial()
        assert generic.total_degree == 6 and len(generic) == 84
        p = pair_polynomial(1, 5)
        assert p.coefficient({"y5": 2, "t5": 2}) == 1 and p.coefficient({}) == -4
        q = pair_polynomial(4, 6)
        assert q.coefficient({"t4": 1, "u4": 1, "t6": 1, "u6": 1}) == 24
        assert q.coefficient({"t4": 2, "u6": 2}) == -12


def test_criterion_2_root_validity(pytestconfig, littlewood):
    with criterion(2, "root validity", 5.0, pytestconfig):
        for name in NAMES:
            x, report = newton_refine(littlewood, fixture_floats(name))
            assert report.converged and residual_inf_norm(littlewood, x) <= 1e-9
            d = pairwise_distances(decode_solution(x))
            assert len(d) == 21 and max(abs(v - 2.0) for v in d) <= 1e-9
            xm, _ = newton_refine(littlewood, fixture_rationals(name), precision_digits=50)
            with mpmath.workdps(50):
                assert max(abs(v) for v in littlewood.evaluate(xm)) <= mpmath.mpf("1e-13")


def test_criterion_3_conditioning(pytestconfig, littlewood, refined):
    with criterion(3, "conditioning", 1.0, pytestconfig):
        for name in NAMES:
            kappa = condition_number(littlewood, refined[name])
            assert kappa <= 1e5
            assert kappa <= PUBLISHED_CONDITION_BOUND


def test_criterion_4_truncation_recovery(pytestconfig, littlewood, refined):
    starts = {
        "first": truncated_fixture("first", 2),
        "second": truncated_fixture("second", 1, {2: 2}),
    }
    with criterion(4, "truncation recovery", 5.0, pytestconfig):
        assert float(starts["second"][2]) == -0.03
        for name, start in starts.items():
            x, report = newton_refine(littlewood, [float(v) for v in start])
            assert report.converged
            assert np.max(np.abs(x - refined[name])) <= 1e-9


def test_criterion_5_alpha_certification(pytestconfig, littlewood):
    points = {
        "first": fixture_rationals("first"),
        "second": [Fraction(v) for v in truncated_fixture("second", 11)],
    }
    with criterion(5, "alpha certification", 60.0, pytestconfig):
        for name, pt in points.items():
            report = certify(littlewood, pt)
            assert report.certified_approximate and report.certified_real and report.isolated
            for key in ("alpha", "beta", "gamma"):
                published = PUBLISHED_ALPHA[name][key]
                assert published / 100 <= float(getattr(report, key)) <= published * 100
        # Minimum-digit observations: one decimal fewer no longer certifies.
        for name, places in (("first", 11), ("second", 10)):
            pt = [Fraction(v) for v in truncated_fixture(name, places)]
            assert not alpha_beta_gamma(littlewood, pt).certified_approximate


def test_criterion_6_krawczyk(pytestconfig, littlewood, refined):
    with criterion(6, "Krawczyk certification and interval soundness", 60.0, pytestconfig):
        for name in NAMES:
            assert krawczyk_verify(littlewood, refined[name], PUBLISHED_RADIUS)
        for cls, p in polynomial_classes().items():
            for mode in ROUNDING_MODES:
                assert containment_violations(p, mode, samples=10_000) == 0, (cls, mode)


def test_criterion_7_non_congruence(pytestconfig):
    with criterion(7, "non-congruence", 1.0, pytestconfig):
        first, second = (decode_solution(fixture_floats(n)) for n in NAMES)
        common = shared_angles(first, second, 1e-6)
        assert len(common) == 1 and abs(common[0] - math.pi / 2) <= 1e-6


def test_criterion_8_toy_homotopy(pytestconfig, toy, imaginary):
    with criterion(8, "homotopy at toy scale", 10.0, pytestconfig):
        result = solve_system(toy, seed=0)
        assert result.bkk == 4 and len(result.paths) == 4
        real = filter_real(result.endpoints(), 1e-8)
        assert len(real) == 4
        for root in TOY_ROOTS:
            assert min(np.max(np.abs(np.asarray(x) - root)) for x in real) <= 1e-9
        ends = solve_system(imaginary, seed=0).endpoints()
        assert len(ends) == 2 and filter_real(ends, 1e-8) == []


def test_criterion_9_full_run_refused(pytestconfig, capsys):
    with criterion(9, "full run refused, estimate reported", None, pytestconfig):
        assert main(["solve", "littlewood"]) == EXIT_USAGE
        err = capsys.readouterr().err
        assert "180,734" in err and "121,098,993,664" in err
        assert main(["solve", "toy", "--max-paths", "0", "--format", "json"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)["summary"]
        assert summary["bkk"] == 4 and not summary["tracked"]
