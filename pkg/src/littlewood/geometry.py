"""Cylinder axes as lines in 3-space: distances, angles and arrangement decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DegenerateDirection, DimensionMismatch, ParallelLines

PARALLEL_RTOL = 1e-12
CYLINDER_RADIUS = 1.0
TOUCHING_DISTANCE = 2.0 * CYLINDER_RADIUS


def _vec3(v) -> tuple[float, float, float]:
    v = tuple(float(c) for c in v)
    if len(v) != 3:
        raise DimensionMismatch(f"expected a 3-vector, got {len(v)} entries")
    return v


@dataclass(frozen=True)
class Line3:
    """Line ``point + s * direction``; the direction need not be normalized."""

    point: tuple[float, float, float]
    direction: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "point", _vec3(self.point))
        object.__setattr__(self, "direction", _vec3(self.direction))
        if not np.linalg.norm(self.direction) > 0.0:
            raise DegenerateDirection(f"zero direction vector for line through {self.point}")

    @property
    def unit_direction(self) -> np.ndarray:
        w = np.asarray(self.direction)
        return w / np.linalg.norm(w)

    def at(self, s: float) -> np.ndarray:
        return np.asarray(self.point) + s * np.asarray(self.direction)


AXIS_1 = Line3((0.0, 0.0, -1.0), (1.0, 0.0, 0.0))
AXIS_2 = Line3((0.0, 0.0, 1.0), (0.0, 1.0, 0.0))


@dataclass(frozen=True)
class Arrangement:
    """Seven axes; the first two are the fixed orthogonal pair."""

    axes: tuple[Line3, ...]

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if len(axes) != 7:
            raise DimensionMismatch(f"an arrangement has 7 axes, got {len(axes)}")
        if axes[0] != AXIS_1 or axes[1] != AXIS_2:
            raise ValueError("the first two axes must be the fixed orthogonal pair")
        for k, ax in enumerate(axes[2:], start=3):
            if ax.point[2] != 0.0:
                raise ValueError(f"axis {k} must pass through the plane z = 0")
            t, u, v = ax.direction
            if not math.isclose(t + u + v, 1.0, rel_tol=0.0, abs_tol=1e-12):
                raise ValueError(f"direction of axis {k} must have coordinate sum 1")

    def solution_vector(self) -> list[float]:
        """Read the 20 unknowns back in (x, y, t, u) block order."""
        out = []
        for ax in self.axes[2:]:
            out += [ax.point[0], ax.point[1], ax.direction[0], ax.direction[1]]
        return out


def _cross_and_offset(a: Line3, b: Line3):
    wa, wb = np.asarray(a.direction), np.asarray(b.direction)
    cross = np.cross(wa, wb)
    offset = np.asarray(b.point) - np.asarray(a.point)
    return wa, wb, cross, offset


def line_distance(a: Line3, b: Line3) -> float:
    """Distance between two non-parallel lines (triple product over cross norm)."""
    wa, wb, cross, offset = _cross_and_offset(a, b)
    norm = math.hypot(*cross)
    if norm <= PARALLEL_RTOL * np.linalg.norm(wa) * np.linalg.norm(wb):
        raise ParallelLines(f"lines with directions {a.direction} and {b.direction} are parallel")
    return abs(math.fsum(offset * cross)) / norm


def touching_residual(a: Line3, b: Line3) -> float:
    """Squared triple product minus four times the squared cross-product norm.

    Zero exactly when the lines are skew at distance 2, or parallel.
    """
    _, _, cross, offset = _cross_and_offset(a, b)
    triple = math.fsum(offset * cross)
    return triple * triple - 4.0 * math.fsum(cross * cross)


def closest_points(a: Line3, b: Line3) -> tuple[np.ndarray, np.ndarray]:
    """Feet of the common perpendicular of two non-parallel lines."""
    wa, wb, cross, offset = _cross_and_offset(a, b)
    denom = float(cross @ cross)
    if math.sqrt(denom) <= PARALLEL_RTOL * np.linalg.norm(wa) * np.linalg.norm(wb):
        raise ParallelLines("closest points are not unique for parallel lines")
    sa = float(np.cross(offset, wb) @ cross) / denom
    sb = float(np.cross(offset, wa) @ cross) / denom
    return a.at(sa), b.at(sb)


def contact_point(a: Line3, b: Line3) -> np.ndarray:
    """Where two touching unit cylinders meet: the midpoint of the common perpendicular."""
    pa, pb = closest_points(a, b)
    return (pa + pb) / 2.0


def point_line_distance(p: Sequence[float], line: Line3) -> float:
    w = line.unit_direction
    d = np.asarray(p, dtype=float) - np.asarray(line.point)
    return float(np.linalg.norm(d - (d @ w) * w))


def decode_solution(values: Sequence[float]) -> Arrangement:
    """Build the arrangement encoded by the 20 unknowns (x_i, y_i, t_i, u_i), i = 3..7."""
    values = [float(v) for v in values]
    if len(values) != 20:
        raise DimensionMismatch(f"a solution vector has 20 entries, got {len(values)}")
    axes = [AXIS_1, AXIS_2]
    for k in range(5):
        x, y, t, u = values[4 * k:4 * k + 4]
        direction = (t, u, 1.0 - t - u)
        if direction == (0.0, 0.0, 0.0):
            raise DegenerateDirection(f"axis {k + 3} decodes to a zero direction")
        axes.append(Line3((x, y, 0.0), direction))
    return Arrangement(tuple(axes))


def axis_pairs(arr: Arrangement) -> list[tuple[int, int]]:
    """1-based index pairs in the order used throughout (lexicographic)."""
    return [(i + 1, j + 1) for i, j in combinations(range(len(arr.axes)), 2)]


def pairwise_distances(arr: Arrangement) -> list[float]:
    return [line_distance(a, b) for a, b in combinations(arr.axes, 2)]


def acute_angle(a: Line3, b: Line3) -> float:
    c = abs(float(a.unit_direction @ b.unit_direction))
    return math.acos(min(1.0, max(-1.0, c)))


def pairwise_angles(arr: Arrangement) -> list[float]:
    """The 21 acute angles between axis directions, sorted ascending."""
    return sorted(acute_angle(a, b) for a, b in combinations(arr.axes, 2))


def congruence_equivalent(a: Arrangement, b: Arrangement, tol: float) -> bool:
    """Necessary condition for congruence: sorted pairwise angles agree within ``tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    return all(abs(x - y) <= tol for x, y in zip(pairwise_angles(a), pairwise_angles(b)))


def shared_angles(a: Arrangement, b: Arrangement, tol: float) -> list[float]:
    """Angles of ``a`` that also occur (within ``tol``) among the angles of ``b``."""
    other = pairwise_angles(b)
    return [x for x in pairwise_angles(a) if any(abs(x - y) <= tol for y in other)]
