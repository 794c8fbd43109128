"""End-to-end polyhedral solve: lifting, cells, start solutions, tracking."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import Diverged, LittlewoodError, StepSizeUnderflow
from ..polysys import PolynomialSystem
from .binomial import binomial_start_solutions
from .cells import MixedCell, enumerate_mixed_cells, mixed_volume
from .lifting import LiftedSupport, random_lifting
from .tracker import HomotopyPath, PolyhedralHomotopy, TrackerOptions, exponent_scale, track_path

DEFAULT_MAX_PATHS = 10**6
IMAG_THRESHOLD = 1e-8


@dataclass
class SolveResult:
    seed: int
    lifted: list[LiftedSupport]
    cells: list[MixedCell]
    bkk: int
    paths: list[HomotopyPath] = field(default_factory=list)
    tracked: bool = True

    @property
    def converged(self) -> list[HomotopyPath]:
        return [p for p in self.paths if p.status == "converged"]

    @property
    def diverged(self) -> list[HomotopyPath]:
        return [p for p in self.paths if p.status == "diverged"]

    def endpoints(self) -> list[np.ndarray]:
        return [p.current for p in self.converged]

    def summary(self) -> dict:
        counts = {s: sum(p.status == s for p in self.paths) for s in ("converged", "diverged", "failed")}
        return {"seed": self.seed, "cells": len(self.cells), "bkk": self.bkk, "tracked": self.tracked,
                "paths": len(self.paths), **counts}


def start_coefficients(lifted: Sequence[LiftedSupport], seed: int) -> list[dict]:
    """Unit-modulus complex coefficients per support point, reproducible from ``seed``."""
    rng = np.random.default_rng([seed, 1])
    out = []
    for ls in lifted:
        angles = rng.random(len(ls.support)) * 2 * math.pi
        out.append({a: complex(math.cos(th), math.sin(th)) for a, th in zip(ls.support, angles)})
    return out


def solve_system(sys: PolynomialSystem, seed: int = 0, opts: TrackerOptions | None = None,
                 max_paths: int = DEFAULT_MAX_PATHS, workers: int = 1) -> SolveResult:
    """Polyhedral homotopy solve of a square system.

    Every cell start solution becomes one path.  Tracking errors are caught
    and recorded in the path status.  With ``max_paths`` below the mixed
    volume, nothing is tracked and only cells and the count are reported.
    """
    if not sys.is_square:
        raise ValueError("solve_system needs a square system")
    opts = opts or TrackerOptions()
    lifted = random_lifting(sys.supports, seed)
    cells = enumerate_mixed_cells(lifted)
    bkk = mixed_volume(cells)
    result = SolveResult(seed, lifted, cells, bkk)
    if bkk > max_paths:
        result.tracked = False
        return result

    cbar = start_coefficients(lifted, seed)
    scale = exponent_scale(lifted, cells)
    jobs = []
    for cell in cells:
        H = PolyhedralHomotopy(sys, lifted, cell, cbar, s_start=opts.s_start, scale=scale)
        coefs = [(c[a], c[b]) for c, (a, b) in zip(cbar, cell.pairs)]
        jobs += [(H, x0) for x0 in binomial_start_solutions(cell, coefs)]

    def run(job) -> HomotopyPath:
        H, x0 = job
        try:
            return track_path(H, x0, opts)
        except (StepSizeUnderflow, Diverged) as exc:
            return exc.path
        except (LittlewoodError, np.linalg.LinAlgError, FloatingPointError) as exc:
            return HomotopyPath(start=x0, current=x0, s=H.s_start, status="failed", message=str(exc))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            result.paths = list(pool.map(run, jobs))
    else:
        result.paths = [run(job) for job in jobs]
    return result


def filter_real(endpoints: Sequence[Sequence[complex]], theta: float = IMAG_THRESHOLD) -> list[np.ndarray]:
    """Real parts of the endpoints whose imaginary parts are all below ``theta`` in magnitude."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    out = []
    for x in endpoints:
        x = np.asarray(x, dtype=complex)
        if np.all(np.abs(x.imag) < theta):
            out.append(x.real.copy())
    return out
