"""Polyhedral homotopy continuation."""

from .binomial import binomial_start_solutions, hermite_form, solve_binomial
from .cells import MixedCell, enumerate_mixed_cells, integer_det, mixed_volume
from .lifting import LiftedSupport, random_lifting
from .pipeline import DEFAULT_MAX_PATHS, IMAG_THRESHOLD, SolveResult, filter_real, solve_system, start_coefficients
from .tracker import (
    HomotopyPath,
    LinearHomotopy,
    PolyhedralHomotopy,
    TargetHomotopy,
    TrackerOptions,
    exponent_scale,
    track_path,
)

__all__ = [
    "DEFAULT_MAX_PATHS",
    "HomotopyPath",
    "IMAG_THRESHOLD",
    "LiftedSupport",
    "LinearHomotopy",
    "MixedCell",
    "PolyhedralHomotopy",
    "SolveResult",
    "TargetHomotopy",
    "TrackerOptions",
    "binomial_start_solutions",
    "enumerate_mixed_cells",
    "exponent_scale",
    "filter_real",
    "hermite_form",
    "integer_det",
    "mixed_volume",
    "random_lifting",
    "solve_binomial",
    "solve_system",
    "start_coefficients",
    "track_path",
]
