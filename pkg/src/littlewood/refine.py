"""Newton refinement of approximate roots and conditioning diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
import scipy.linalg

from .errors import Diverged, MaxIterations, SingularJacobian
from .polysys import PolynomialSystem

DIVERGENCE_FACTOR = 1e4


@dataclass
class RefineReport:
    iterates: int
    final_residual_inf_norm: float
    step_norms: list[float] = field(default_factory=list)
    converged: bool = False
    precision_digits: int = 16


def _qr_solve(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    Q, R, perm = scipy.linalg.qr(J, pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[-1] <= np.finfo(float).eps * J.shape[0] * diag[0]:
        raise SingularJacobian("Jacobian is numerically singular")
    z = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    out = np.empty_like(z)
    out[perm] = z
    return out


def newton_refine(
    sys: PolynomialSystem,
    x0: Sequence,
    tol: float | None = None,
    max_iter: int = 50,
    precision_digits: int | None = None,
):
    """Newton's method from ``x0`` until the residual infinity-norm is at most ``tol``.

    In double precision (the default) linear solves use column-pivoted QR.
    With ``precision_digits`` above 16 the iteration runs in mpmath at that
    many digits (plus guard digits) and returns mpmath numbers; the default
    tolerance then becomes ``10**-precision_digits``.

    Each Newton direction is damped by step halving until the residual
    2-norm decreases (Armijo test); near a regular root the full step always
    passes, so the local quadratic rate is untouched.  Iteration also stops
    when the update no longer changes ``x`` or no damped step decreases the
    residual (rounding floor); the report says whether ``tol`` was reached.
    """
    if precision_digits is not None and precision_digits > 16:
        return _newton_mp(sys, x0, tol, max_iter, precision_digits)
    tol = 1e-12 if tol is None else tol
    x = np.array([float(v) for v in x0])
    report = RefineReport(0, float("inf"))
    residual = float(np.max(np.abs(sys.evaluate(x)))) if len(x) else 0.0
    start = residual
    while True:
        report.final_residual_inf_norm = residual
        if residual <= tol:
            report.converged = True
            return x, report
        if report.iterates >= max_iter:
            raise MaxIterations(f"no convergence after {max_iter} Newton steps (residual {residual:.3e})")
        F = sys.evaluate(x)
        direction = _qr_solve(sys.jacobian_at(x), -F)
        lam = _damping(lambda y: np.linalg.norm(sys.evaluate(y)), x, direction, float(np.linalg.norm(F)))
        if lam is None:
            report.converged = False
            return x, report
        step = lam * direction
        x_new = x + step
        report.iterates += 1
        report.step_norms.append(float(np.linalg.norm(step)))
        stalled = np.array_equal(x_new, x)
        x = x_new
        residual = float(np.max(np.abs(sys.evaluate(x))))
        if not np.isfinite(residual) or residual > DIVERGENCE_FACTOR * max(start, tol):
            raise Diverged(f"residual grew from {start:.3e} to {residual:.3e}")
        if stalled:
            report.final_residual_inf_norm = residual
            report.converged = residual <= tol
            return x, report


def _damping(norm_at, x, direction, f0, min_lam=2.0 ** -30):
    """Largest ``2**-k`` with sufficient residual decrease, or None."""
    lam = 1.0
    while lam >= min_lam:
        if norm_at(x + lam * direction if isinstance(x, np.ndarray) else
                   [a + lam * d for a, d in zip(x, direction)]) <= (1.0 - 1e-4 * lam) * f0:
            return lam
        lam /= 2.0
    return None


def _newton_mp(sys, x0, tol, max_iter, digits):
    with mpmath.workdps(digits + 10):
        tol = mpmath.mpf(10) ** (-digits) if tol is None else mpmath.mpf(tol)
        x = [mpmath.mpf(str(v)) if not isinstance(v, mpmath.mpf) else v for v in x0]
        report = RefineReport(0, float("inf"), precision_digits=digits)
        F = sys.evaluate(x)
        residual = max(abs(v) for v in F)
        start = residual
        while True:
            report.final_residual_inf_norm = float(residual)
            if residual <= tol:
                report.converged = True
                return x, report
            if report.iterates >= max_iter:
                raise MaxIterations(f"no convergence after {max_iter} Newton steps")
            J = mpmath.matrix(sys.jacobian_at(x))
            try:
                direction = mpmath.lu_solve(J, -mpmath.matrix(F))
            except ZeroDivisionError:
                raise SingularJacobian("Jacobian is singular") from None
            direction = list(direction)
            lam = _damping(lambda y: mpmath.norm(sys.evaluate(y)), x, direction, mpmath.norm(F))
            if lam is None:
                report.converged = False
                return x, report
            step = mpmath.matrix([lam * d for d in direction])
            x = [xi + si for xi, si in zip(x, step)]
            report.iterates += 1
            report.step_norms.append(float(mpmath.norm(step)))
            F = sys.evaluate(x)
            residual = max(abs(v) for v in F)
            if residual > DIVERGENCE_FACTOR * max(start, tol):
                raise Diverged(f"residual grew from {float(start):.3e} to {float(residual):.3e}")


def condition_number(sys: PolynomialSystem, x: Sequence) -> float:
    """2-norm condition number of the Jacobian at ``x`` (ratio of extreme singular values)."""
    J = sys.jacobian_at(np.array([float(v) for v in x]))
    s = np.linalg.svd(J, compute_uv=False)
    if s[-1] == 0.0 or s[-1] <= np.finfo(float).eps * s[0]:
        raise SingularJacobian("Jacobian is singular at this point")
    return float(s[0] / s[-1])


def residual_inf_norm(sys: PolynomialSystem, x: Sequence) -> float:
    return float(max(abs(v) for v in sys.evaluate(x)))
