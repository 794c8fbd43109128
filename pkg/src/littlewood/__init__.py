"""Seven mutually touching infinite cylinders: construction, solving and certification."""

from .certify_alpha import AlphaReport, alpha_beta_gamma, certify
from .geometry import Arrangement, Line3, decode_solution, line_distance, pairwise_angles
from .interval import Interval, krawczyk_operator, krawczyk_verify
from .polysys import (
    PolynomialSystem,
    SparsePolynomial,
    build_generic_distance_polynomial,
    build_littlewood_system,
    parse_polynomial,
)
from .refine import condition_number, newton_refine

__version__ = "0.1.0"

__all__ = [
    "AlphaReport",
    "Arrangement",
    "Interval",
    "Line3",
    "PolynomialSystem",
    "SparsePolynomial",
    "alpha_beta_gamma",
    "build_generic_distance_polynomial",
    "build_littlewood_system",
    "certify",
    "condition_number",
    "decode_solution",
    "krawczyk_operator",
    "krawczyk_verify",
    "line_distance",
    "newton_refine",
    "pairwise_angles",
    "parse_polynomial",
]
