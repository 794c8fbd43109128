"""Predictor-corrector path tracking.

Homotopies are parameterized by ``s`` in ``(0, 1]`` with ``s = exp(t)``, so
``t = 0`` (``s = 1``) is the target system.  The predictor integrates the
Davidenko equation ``dx/ds = -H_x^{-1} H_s`` with one classical RK4 step;
the corrector runs at most ``max_corrector_iters`` Newton iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from ..errors import Diverged, StepSizeUnderflow
from ..polysys import PolynomialSystem
from .cells import MixedCell
from .lifting import LiftedSupport


@dataclass
class TrackerOptions:
    s_start: float = 1e-6
    start_tol: float = 1e-6
    end_tol: float = 1e-10
    initial_step: float = 1e-2
    max_step: float = 0.05
    min_step: float = 1e-14
    max_corrector_iters: int = 3
    corrector_tol: float = 1e-9
    max_jump: float = 0.1
    blowup_bound: float = 1e8
    # A stall this close to s = 1 with |x| this large means a root at infinity.
    endgame_gap: float = 1e-6
    infinity_bound: float = 1e3
    max_steps: int = 100_000
    polish_iters: int = 20


@dataclass
class HomotopyPath:
    start: np.ndarray
    current: np.ndarray
    s: float
    status: str = "tracking"  # tracking | converged | diverged | failed
    steps: int = 0
    rejected: int = 0
    residual: float = math.nan
    message: str = ""

    @property
    def t(self) -> float:
        return math.log(self.s) if self.s > 0 else -math.inf

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "s": self.s,
            "t": self.t,
            "steps": self.steps,
            "residual": self.residual,
            "coordinates": [[float(z.real), float(z.imag)] for z in self.current],
        }


class Homotopy(Protocol):
    nvars: int
    s_start: float
    target: PolynomialSystem

    def value(self, x: np.ndarray, s: float) -> np.ndarray: ...

    def dx(self, x: np.ndarray, s: float) -> np.ndarray: ...

    def ds(self, x: np.ndarray, s: float) -> np.ndarray: ...


class _Monomials:
    """Dense exponent matrix (m x n) of one support."""

    def __init__(self, exps: np.ndarray):
        self.exps = exps

    def monomials(self, x: np.ndarray) -> np.ndarray:
        return np.prod(x[None, :] ** self.exps, axis=1)

    def monomial_partials(self, x: np.ndarray) -> np.ndarray:
        """(m x n) array of d(x^a)/dx_k; zero where the exponent is zero."""
        m, n = self.exps.shape
        out = np.zeros((m, n), dtype=complex)
        for k in range(n):
            e = self.exps.copy()
            mask = e[:, k] > 0
            e[:, k] = np.where(mask, e[:, k] - 1, 0)
            out[:, k] = np.where(mask, self.exps[:, k] * np.prod(x[None, :] ** e, axis=1), 0)
        return out


class PolyhedralHomotopy:
    """``h_j(x, s) = sum_a [(1 - s) cbar_a + s c_a] x^a s^{k (<(a, w(a)), (alpha, 1)> - beta_j)}``.

    ``k`` rescales the exponents (the substitution ``s -> s**k``) so that the
    start parameter ``s_start`` is meaningful for any lifting.  All cells of
    one solve must share ``k``, otherwise their paths belong to different
    homotopies; ``exponent_scale`` computes the common value, and a lone cell
    defaults to its own.  At ``s = 0`` only the cell's pairs survive, giving
    the binomial start system.
    """

    def __init__(self, target: PolynomialSystem, lifted: Sequence[LiftedSupport], cell: MixedCell,
                 start_coefficients: Sequence[dict], s_start: float = 1e-6, scale: float | None = None):
        self.target = target
        self.cell = cell
        self.nvars = target.nvars
        self.s_start = s_start
        minima = cell.minima(lifted)
        raw = []
        for p, ls, beta, pair, cbar in zip(target, lifted, minima, cell.pairs, start_coefficients):
            support = list(ls.support)
            exps = np.array(support, dtype=np.int64).reshape(len(support), self.nvars)
            # pair terms sit exactly on the minimum; clip LP round-off elsewhere
            powers = np.array([0.0 if a in pair else max(0.0, ls.lifted_value(a, cell.inner_normal) - beta)
                               for a in support])
            c_target = np.array([complex(p.coefficient(a)) for a in support])
            c_start = np.array([complex(cbar[a]) for a in support])
            raw.append((exps, powers, c_start, c_target))
        self.scale = scale if scale is not None else exponent_scale(lifted, [cell])
        self.parts = [(_Monomials(e), pw * self.scale, cs, ct) for e, pw, cs, ct in raw]

    def _coefs(self, s: float, powers, cs, ct) -> np.ndarray:
        return ((1 - s) * cs + s * ct) * np.where(powers > 0, s ** powers, 1.0)

    def value(self, x, s):
        return np.array([np.sum(self._coefs(s, pw, cs, ct) * comp.monomials(x))
                         for comp, pw, cs, ct in self.parts])

    def dx(self, x, s):
        return np.array([self._coefs(s, pw, cs, ct) @ comp.monomial_partials(x)
                         for comp, pw, cs, ct in self.parts])

    def ds(self, x, s):
        out = []
        for comp, pw, cs, ct in self.parts:
            sp = np.where(pw > 0, s ** pw, 1.0)
            dsp = np.where(pw > 0, pw * s ** np.where(pw > 0, pw - 1, 0.0), 0.0)
            coef = (ct - cs) * sp + ((1 - s) * cs + s * ct) * dsp
            out.append(np.sum(coef * comp.monomials(x)))
        return np.array(out)


def _cell_powers(lifted: Sequence[LiftedSupport], cell: MixedCell):
    for ls, beta, pair in zip(lifted, cell.minima(lifted), cell.pairs):
        for a in ls.support:
            if a not in pair:
                yield ls.lifted_value(a, cell.inner_normal) - beta


def exponent_scale(lifted: Sequence[LiftedSupport], cells: Sequence[MixedCell]) -> float:
    """``1 / (smallest positive power over all cells)``, the common ``k``."""
    positive = [v for cell in cells for v in _cell_powers(lifted, cell) if v > 0]
    return 1.0 / min(positive) if positive else 1.0


class LinearHomotopy:
    """``(1 - s) * gamma * G(x) + s * F(x)`` between a start system G and a target F."""

    def __init__(self, start: PolynomialSystem, target: PolynomialSystem, gamma: complex = 1.0,
                 s_start: float = 0.0):
        if start.variables != target.variables:
            raise ValueError("start and target systems must share variables")
        self.start_system = start
        self.target = target
        self.gamma = complex(gamma)
        self.nvars = target.nvars
        self.s_start = s_start

    def value(self, x, s):
        return (1 - s) * self.gamma * self.start_system.evaluate(x) + s * self.target.evaluate(x)

    def dx(self, x, s):
        return (1 - s) * self.gamma * self.start_system.jacobian_at(x) + s * self.target.jacobian_at(x)

    def ds(self, x, s):
        return self.target.evaluate(x) - self.gamma * self.start_system.evaluate(x)


class TargetHomotopy:
    """The homotopy at its end point only: ``H(x, s) = P(x)``, starting at ``s = 1``."""

    def __init__(self, target: PolynomialSystem):
        self.target = target
        self.nvars = target.nvars
        self.s_start = 1.0

    def value(self, x, s):
        return self.target.evaluate(x)

    def dx(self, x, s):
        return self.target.jacobian_at(x)

    def ds(self, x, s):
        return np.zeros(self.nvars, dtype=complex)


def _tangent(H, x, s):
    return -np.linalg.solve(H.dx(x, s), H.ds(x, s))


def _correct(H, x, s, opts: TrackerOptions):
    """Newton at fixed ``s``; returns (accepted, x)."""
    scale = 1.0 + np.linalg.norm(x)
    for k in range(opts.max_corrector_iters):
        try:
            step = np.linalg.solve(H.dx(x, s), -H.value(x, s))
        except np.linalg.LinAlgError:
            return False, x
        norm = np.linalg.norm(step)
        if not np.isfinite(norm) or (k == 0 and norm > opts.max_jump * scale):
            return False, x
        x = x + step
        if norm <= opts.corrector_tol * scale:
            return True, x
    return False, x


def endpoint_tolerance(target: PolynomialSystem, x: np.ndarray, end_tol: float) -> float:
    """``end_tol`` scaled by the size of the leading terms at ``x``."""
    return end_tol * max(1.0, float(np.max(np.abs(x)))) ** max(target.degrees, default=1)


def _polish(target: PolynomialSystem, x: np.ndarray, opts: TrackerOptions):
    res = float(np.max(np.abs(target.evaluate(x))))
    for _ in range(opts.polish_iters):
        if res <= endpoint_tolerance(target, x, opts.end_tol):
            break
        try:
            step = np.linalg.solve(target.jacobian_at(x), -target.evaluate(x))
        except np.linalg.LinAlgError:
            break
        x_new = x + step
        res_new = float(np.max(np.abs(target.evaluate(x_new))))
        if not res_new < res and np.array_equal(x_new, x):
            break
        x, res = x_new, res_new
    return x, res


def track_path(H, start: Sequence[complex], opts: TrackerOptions | None = None) -> HomotopyPath:
    """Follow the solution path of ``H`` from ``H.s_start`` to ``s = 1``.

    Raises StepSizeUnderflow or Diverged; the partial path is attached to the
    exception as ``.path``.
    """
    opts = opts or TrackerOptions()
    x = np.array(start, dtype=complex)
    s = float(H.s_start)
    path = HomotopyPath(start=x.copy(), current=x, s=s)

    def fail(exc_type, status, message):
        path.current, path.s, path.status, path.message = x, s, status, message
        exc = exc_type(message)
        exc.path = path
        raise exc

    if s < 1.0:
        ok, x_corr = _correct(H, x, s, TrackerOptions(**{**opts.__dict__, "max_corrector_iters": 20,
                                                         "max_jump": math.inf}))
        x = x_corr
        residual0 = float(np.max(np.abs(H.value(x, s))))
        if residual0 > opts.start_tol:
            fail(StepSizeUnderflow, "failed", f"start point residual {residual0:.3e} exceeds start_tol")

    h = opts.initial_step
    successes = 0
    while s < 1.0:
        if path.steps + path.rejected >= opts.max_steps:
            fail(StepSizeUnderflow, "failed", "step budget exhausted")
        h = min(h, 1.0 - s)
        s_next = 1.0 if h >= 1.0 - s else s + h
        try:
            k1 = _tangent(H, x, s)
            k2 = _tangent(H, x + 0.5 * h * k1, s + 0.5 * h)
            k3 = _tangent(H, x + 0.5 * h * k2, s + 0.5 * h)
            k4 = _tangent(H, x + h * k3, s_next)
            predicted = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            ok, corrected = _correct(H, predicted, s_next, opts) if np.all(np.isfinite(predicted)) else (False, x)
        except np.linalg.LinAlgError:
            ok = False
        if ok:
            x, s = corrected, s_next
            path.steps += 1
            successes += 1
            if successes >= 3:
                h = min(2.0 * h, opts.max_step)
                successes = 0
            if np.linalg.norm(x) > opts.blowup_bound:
                fail(Diverged, "diverged", f"|x| exceeded {opts.blowup_bound:g} at s={s:.6g}")
        else:
            path.rejected += 1
            successes = 0
            h *= 0.5
            if h < opts.min_step:
                if 1.0 - s <= opts.endgame_gap and np.linalg.norm(x) > opts.infinity_bound:
                    fail(Diverged, "diverged", f"path heads to infinity (|x|={np.linalg.norm(x):.3e} at s={s:.9g})")
                fail(StepSizeUnderflow, "failed", f"step size below {opts.min_step:g} at s={s:.6g}")

    x, res = _polish(H.target, x, opts)
    path.current, path.s, path.residual = x, 1.0, res
    if np.linalg.norm(x) > opts.blowup_bound:
        fail(Diverged, "diverged", "endpoint beyond blowup bound")
    tol = endpoint_tolerance(H.target, x, opts.end_tol)
    path.status = "converged" if res <= tol else "failed"
    if path.status == "failed":
        path.message = f"endpoint residual {res:.3e} above {tol:.3e}"
    return path
