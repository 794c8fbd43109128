"""Outward-rounded interval arithmetic and the Krawczyk existence test.

Python exposes no control over the FPU rounding mode, so directed rounding is
realized in software.  Two modes are available:

``"exact"`` (default)
    Error-free transformations (TwoSum, Dekker's TwoProduct) recover the
    rounding error of each ``+`` and ``*``; the result is moved by one ulp only
    when the float result is on the wrong side of the exact one.  This is true
    round-down / round-up.
``"nudge"``
    Every computed endpoint is pushed one ulp outward unconditionally.

The mode lives in a :class:`contextvars.ContextVar`, so concurrent
verifications never share rounding state.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, SingularJacobian
from .polysys import PolynomialSystem, SparsePolynomial

ROUNDING_MODES = ("exact", "nudge")
_rounding: contextvars.ContextVar[str] = contextvars.ContextVar("littlewood_rounding", default="exact")

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_SAFE = 2.0 ** 996  # Veltkamp splitting overflows beyond this


def rounding_mode() -> str:
    return _rounding.get()


@contextlib.contextmanager
def rounding(mode: str):
    if mode not in ROUNDING_MODES:
        raise ValueError(f"unknown rounding mode {mode!r}")
    token = _rounding.set(mode)
    try:
        yield
    finally:
        _rounding.reset(token)


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_down(a: float, b: float) -> float:
    s = a + b
    if not math.isfinite(s) or rounding_mode() == "nudge":
        return _down(s)
    return _down(s) if _two_sum_err(a, b, s) < 0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if not math.isfinite(s) or rounding_mode() == "nudge":
        return _up(s)
    return _up(s) if _two_sum_err(a, b, s) > 0 else s


def _prod_err_ok(a: float, b: float, p: float) -> bool:
    # EFT is exact only away from overflow and from underflow (a zero p here means underflow)
    return (math.isfinite(p) and abs(a) < _SAFE and abs(b) < _SAFE
            and abs(p) > 1e-270 and rounding_mode() == "exact")


def mul_down(a: float, b: float) -> float:
    p = a * b
    if a == 0.0 or b == 0.0:
        return 0.0
    if not _prod_err_ok(a, b, p):
        return _down(p)
    return _down(p) if _two_prod_err(a, b, p) < 0 else p


def mul_up(a: float, b: float) -> float:
    p = a * b
    if a == 0.0 or b == 0.0:
        return 0.0
    if not _prod_err_ok(a, b, p):
        return _up(p)
    return _up(p) if _two_prod_err(a, b, p) > 0 else p


def _pow_down_pos(a: float, n: int) -> float:
    out = 1.0
    for _ in range(n):
        out = mul_down(out, a)
    return out


def _pow_up_pos(a: float, n: int) -> float:
    out = 1.0
    for _ in range(n):
        out = mul_up(out, a)
    return out


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value) -> "Interval":
        """Tightest float interval containing ``value`` (int, float or Fraction)."""
        if isinstance(value, Interval):
            return value
        if isinstance(value, float):
            return cls(value, value)
        q = Fraction(value)
        f = float(q)
        exact = Fraction(f)
        if exact == q:
            return cls(f, f)
        return cls(f, _up(f)) if exact < q else cls(_down(f), f)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, value) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, float):
            return self.lo <= value <= self.hi
        q = Fraction(value)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def interior_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a == b and c == d:
            return Interval(mul_down(a, c), mul_up(a, c))
        lo = min(mul_down(a, c), mul_down(a, d), mul_down(b, c), mul_down(b, d))
        hi = max(mul_up(a, c), mul_up(a, d), mul_up(b, c), mul_up(b, d))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def square(self) -> "Interval":
        return self ** 2

    def __pow__(self, n: int) -> "Interval":
        """Range-aware power: even powers of intervals around 0 start at 0."""
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer exponents")
        if n == 0:
            return Interval(1.0, 1.0)
        a, b = self.lo, self.hi
        if n % 2 == 1:
            lo = _pow_down_pos(a, n) if a >= 0 else -_pow_up_pos(-a, n)
            hi = _pow_up_pos(b, n) if b >= 0 else -_pow_down_pos(-b, n)
            return Interval(lo, hi)
        if a >= 0:
            return Interval(_pow_down_pos(a, n), _pow_up_pos(b, n))
        if b <= 0:
            return Interval(_pow_down_pos(-b, n), _pow_up_pos(-a, n))
        return Interval(0.0, _pow_up_pos(max(-a, b), n))

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def _coerce(value) -> Interval:
    return value if isinstance(value, Interval) else Interval.point(value)


def interval_sum(values) -> Interval:
    lo, hi = 0.0, 0.0
    for v in values:
        lo, hi = add_down(lo, v.lo), add_up(hi, v.hi)
    return Interval(lo, hi)


@dataclass(frozen=True)
class IntervalBox:
    """Infinity-norm ball around ``center``; endpoints are rounded outward."""

    center: tuple[float, ...]
    radius: float
    components: tuple[Interval, ...]

    @classmethod
    def around(cls, center: Sequence[float], radius: float) -> "IntervalBox":
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        c = tuple(float(v) for v in center)
        comps = tuple(Interval(add_down(v, -radius), add_up(v, radius)) for v in c)
        return cls(c, float(radius), comps)

    def __len__(self) -> int:
        return len(self.components)


def _poly_enclosure(p: SparsePolynomial, comps: Sequence[Interval], coef_cache: dict) -> Interval:
    pow_cache: dict[tuple[int, int], Interval] = {}
    terms = []
    for e, c in p.terms.items():
        if c not in coef_cache:
            coef_cache[c] = Interval.point(c)
        term = coef_cache[c]
        for k, n in enumerate(e):
            if n:
                key = (k, n)
                if key not in pow_cache:
                    pow_cache[key] = comps[k] ** n
                term = term * pow_cache[key]
        terms.append(term)
    return interval_sum(terms)


def _components(sys_vars: int, box) -> tuple[Interval, ...]:
    comps = box.components if isinstance(box, IntervalBox) else tuple(_coerce(b) for b in box)
    if len(comps) != sys_vars:
        raise DimensionMismatch(f"box has dimension {len(comps)}, expected {sys_vars}")
    return comps


def interval_eval(sys: PolynomialSystem | SparsePolynomial, box) -> list[Interval] | Interval:
    """Rigorous enclosure of each polynomial's range over ``box``."""
    if isinstance(sys, SparsePolynomial):
        return _poly_enclosure(sys, _components(sys.nvars, box), {})
    comps = _components(sys.nvars, box)
    cache: dict = {}
    return [_poly_enclosure(p, comps, cache) for p in sys]


def interval_jacobian(sys: PolynomialSystem, box) -> list[list[Interval]]:
    comps = _components(sys.nvars, box)
    cache: dict = {}
    return [[_poly_enclosure(d, comps, cache) for d in row] for row in sys.jacobian()]


@dataclass
class KrawczykReport:
    K: list[Interval]
    box: IntervalBox
    contained: bool
    contraction_factor: float
    rounding: str = "exact"

    def to_dict(self) -> dict:
        return {
            "radius": self.box.radius,
            "contained": self.contained,
            "contraction_factor": self.contraction_factor,
            "rounding": self.rounding,
            "per_component": [[k.lo, k.hi, b.lo, b.hi] for k, b in zip(self.K, self.box.components)],
        }


def _point_times(y: float, iv: Interval) -> Interval:
    if iv.lo == iv.hi:
        return Interval(mul_down(y, iv.lo), mul_up(y, iv.lo))
    if y >= 0:
        return Interval(mul_down(y, iv.lo), mul_up(y, iv.hi))
    return Interval(mul_down(y, iv.hi), mul_up(y, iv.lo))


def krawczyk_operator(sys: PolynomialSystem, x: Sequence[float], r: float) -> KrawczykReport:
    """Krawczyk set ``x - Y F(x) + (I - Y DF(X)) (X - x)`` for ``X = [x]_r``.

    ``Y`` is a float approximation of ``DF(x)^-1``; any fixed matrix keeps
    the test valid.  All other quantities are interval enclosures.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    x = [float(v) for v in x]
    n = len(x)
    if n != sys.nvars or not sys.is_square:
        raise DimensionMismatch("Krawczyk test needs a square system and a matching point")
    J = sys.jacobian_at(np.array(x))
    s = np.linalg.svd(J, compute_uv=False)
    if s[-1] == 0.0 or s[-1] <= np.finfo(float).eps * s[0]:
        raise SingularJacobian("Jacobian is singular at the center")
    Y = np.linalg.inv(J)

    box = IntervalBox.around(x, r)
    Fx = interval_eval(sys, [Interval(v, v) for v in x])
    JX = interval_jacobian(sys, box)
    offsets = [c - v for c, v in zip(box.components, x)]

    K = []
    rows_mag = []
    for i in range(n):
        yi = [float(v) for v in Y[i]]
        newton = Interval(x[i], x[i]) - interval_sum(_point_times(yi[k], Fx[k]) for k in range(n))
        M_row = []
        for j in range(n):
            prod = interval_sum(_point_times(yi[k], JX[k][j]) for k in range(n))
            M_row.append((1.0 if i == j else 0.0) - prod)
        rows_mag.append(math.fsum(m.mag for m in M_row))
        K.append(newton + interval_sum(m * o for m, o in zip(M_row, offsets)))

    contained = all(b.interior_contains(k) for k, b in zip(K, box.components))
    return KrawczykReport(K, box, contained, max(rows_mag), rounding_mode())


def krawczyk_verify(sys: PolynomialSystem, x: Sequence[float], r: float) -> bool:
    """True proves a unique zero of ``sys`` in the box of radius ``r`` around ``x``."""
    return krawczyk_operator(sys, x, r).contained
