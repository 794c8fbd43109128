"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials live over an explicit, ordered variable list and store a map from
exponent tuples to :class:`fractions.Fraction` coefficients.  Floating views
(numpy arrays of exponents and coefficients) are built lazily for fast
evaluation; exact evaluation stays in rationals.

The module also builds the generic degree-6 distance polynomial of two lines
and the 20 x 20 system of five axes touching two fixed orthogonal axes and
each other.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from numbers import Number, Rational
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, UnknownVariable

Exponent = tuple[int, ...]
Coefficient = Union[int, Fraction]

GENERIC_VARIABLES = ("xi", "yi", "zi", "ti", "ui", "vi", "xj", "yj", "zj", "tj", "uj", "vj")
FREE_AXES = (3, 4, 5, 6, 7)
LITTLEWOOD_VARIABLES = tuple(f"{c}{i}" for i in FREE_AXES for c in "xytu")


def _as_rational(value) -> Coefficient:
    """Exact coefficient; integral values are kept as ``int`` for speed."""
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, (Fraction, Rational, float, str)):
        value = Fraction(value)
        return value.numerator if value.denominator == 1 else value
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


class SparsePolynomial:
    """Exponent-tuple -> rational coefficient map over a fixed variable list.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "terms", "_float_cache")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Coefficient] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict[Exponent, Coefficient] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"exponent {exps} has length {len(exps)}, expected {n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_rational(coef)
            if c:
                clean[exps] = _as_rational(clean.get(exps, 0) + c)
                if not clean[exps]:
                    del clean[exps]
        self.terms: dict[Exponent, Coefficient] = clean
        self._float_cache = None

    @classmethod
    def _make(cls, variables: tuple[str, ...], terms: dict) -> "SparsePolynomial":
        # trusted constructor: drops zeros, skips validation
        self = cls.__new__(cls)
        self.variables = variables
        self.terms = {e: (c.numerator if type(c) is Fraction and c.denominator == 1 else c)
                      for e, c in terms.items() if c}
        self._float_cache = None
        return self

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, variables: Sequence[str]) -> "SparsePolynomial":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "SparsePolynomial":
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(name)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def generators(cls, variables: Sequence[str]) -> tuple["SparsePolynomial", ...]:
        return tuple(cls.variable(v, variables) for v in variables)

    # -- basic queries ----------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def support(self) -> list[Exponent]:
        return sorted(self.terms, key=_grlex_key)

    def used_variables(self) -> set[str]:
        used = set()
        for exps in self.terms:
            used.update(v for v, e in zip(self.variables, exps) if e)
        return used

    def coefficient(self, monomial: Union[Exponent, Mapping[str, int]]) -> Fraction:
        """Coefficient of a monomial given as an exponent tuple or ``{name: power}``."""
        if isinstance(monomial, Mapping):
            unknown = set(monomial) - set(self.variables)
            if unknown:
                raise UnknownVariable(", ".join(sorted(unknown)))
            monomial = tuple(monomial.get(v, 0) for v in self.variables)
        return Fraction(self.terms.get(tuple(monomial), 0))

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePolynomial):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SparsePolynomial.constant(other, self.variables)
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"SparsePolynomial({self.to_text()!r}, variables={list(self.variables)})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.variables != self.variables:
                raise DimensionMismatch("polynomials live over different variable lists")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return SparsePolynomial.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return SparsePolynomial._make(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial._make(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Exponent, Coefficient] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(int.__add__, e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return SparsePolynomial._make(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = SparsePolynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus and substitution -----------------------------------------

    def diff(self, name: str) -> "SparsePolynomial":
        """Exact partial derivative with respect to ``name``."""
        try:
            k = self.variables.index(name)
        except ValueError:
            raise UnknownVariable(name) from None
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                d = list(e)
                d[k] -= 1
                terms[tuple(d)] = c * e[k]
        return SparsePolynomial._make(self.variables, terms)

    def embed(self, variables: Sequence[str]) -> "SparsePolynomial":
        """Re-express over another variable list that contains every used variable."""
        variables = tuple(variables)
        missing = self.used_variables() - set(variables)
        if missing:
            raise UnknownVariable(", ".join(sorted(missing)))
        pos = {v: i for i, v in enumerate(variables)}
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for v, p in zip(self.variables, e):
                if p:
                    ne[pos[v]] = p
            terms[tuple(ne)] = c
        return SparsePolynomial(variables, terms)

    def rename(self, mapping: Mapping[str, str]) -> "SparsePolynomial":
        unknown = set(mapping) - set(self.variables)
        if unknown:
            raise UnknownVariable(", ".join(sorted(unknown)))
        return SparsePolynomial([mapping.get(v, v) for v in self.variables], self.terms)

    def substitute(self, bindings: Mapping[str, Union["SparsePolynomial", Coefficient, str]]) -> "SparsePolynomial":
        """Substitute variables by numbers or (affine) polynomials and expand.

        Bound variables disappear from the result; variables appearing only in
        binding expressions are appended after the remaining ones.  Binding
        expressions may be given as strings such as ``"1 - t - u"``.
        """
        unknown = set(bindings) - set(self.variables)
        if unknown:
            raise UnknownVariable(", ".join(sorted(unknown)))
        remaining = [v for v in self.variables if v not in bindings]
        parsed = {}
        for name, value in bindings.items():
            if isinstance(value, str):
                value = parse_polynomial(value)
            parsed[name] = value
        extra: list[str] = []
        for value in parsed.values():
            if isinstance(value, SparsePolynomial):
                for v in value.variables:
                    if v in value.used_variables() and v not in remaining and v not in extra:
                        extra.append(v)
        out_vars = tuple(remaining + extra)
        images = []
        for v in self.variables:
            if v in parsed:
                value = parsed[v]
                if isinstance(value, SparsePolynomial):
                    images.append(value.embed(out_vars) if value.used_variables() else
                                  SparsePolynomial.constant(value.terms.get((0,) * value.nvars, 0), out_vars))
                else:
                    images.append(SparsePolynomial.constant(value, out_vars))
            else:
                images.append(SparsePolynomial.variable(v, out_vars))
        powers: dict[tuple[int, int], SparsePolynomial] = {}

        def power(k: int, p: int) -> SparsePolynomial:
            if (k, p) not in powers:
                powers[(k, p)] = images[k] ** p
            return powers[(k, p)]

        result = SparsePolynomial(out_vars)
        for e, c in self.terms.items():
            term = SparsePolynomial.constant(c, out_vars)
            for k, p in enumerate(e):
                if p:
                    term = term * power(k, p)
            result = result + term
        return result

    # -- evaluation -------------------------------------------------------

    def _float_view(self):
        if self._float_cache is None:
            exps = np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.nvars)
            coefs = np.array([float(c) for c in self.terms.values()], dtype=float)
            self._float_cache = (exps, coefs)
        return self._float_cache

    def evaluate(self, point: Sequence):
        """Evaluate at ``point``.

        Rational (int/Fraction) points are evaluated exactly.  Float points use
        compensated summation over terms; complex points sum real and imaginary
        parts separately with :func:`math.fsum`.  Other number types (mpmath,
        gmpy2) go through a generic loop in their own arithmetic.
        """
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has length {len(point)}, expected {self.nvars}")
        if not self.terms:
            return _zero_like(point)
        if isinstance(point, np.ndarray) and point.dtype.kind in "fc":
            return self._evaluate_numpy(point)
        kinds = {type(p) for p in point}
        if kinds <= {int, Fraction}:
            return self._evaluate_generic([Fraction(p) for p in point], Fraction(0))
        if kinds <= {int, float}:
            return self._evaluate_numpy(np.asarray(point, dtype=float))
        if kinds <= {int, float, complex}:
            return self._evaluate_numpy(np.asarray(point, dtype=complex))
        return self._evaluate_generic(list(point), None)

    def _evaluate_numpy(self, x: np.ndarray):
        exps, coefs = self._float_view()
        vals = coefs * np.prod(x[None, :] ** exps, axis=1)
        if x.dtype.kind == "c":
            return complex(math.fsum(vals.real), math.fsum(vals.imag))
        return math.fsum(vals)

    def _evaluate_generic(self, x: list, zero):
        cache: dict[tuple[int, int], object] = {}
        total = zero
        for e, c in self.terms.items():
            term = c if zero is not None else _convert_coef(c, x)
            for k, p in enumerate(e):
                if p:
                    key = (k, p)
                    if key not in cache:
                        cache[key] = x[k] ** p
                    term = term * cache[key]
            total = term if total is None else total + term
        return total

    # -- text formats -------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return [(e, self.terms[e]) for e in self.support]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            body = f"{sign}{abs(c)}"
            mono = _monomial_text(e, self.variables)
            parts.append(f"{body} * {mono}" if mono else body)
        return " ".join(parts)

    def to_json(self) -> list:
        return [[str(c), list(e)] for e, c in self.sorted_terms()]


def _zero_like(point):
    if isinstance(point, np.ndarray):
        return 0j if point.dtype.kind == "c" else 0.0
    kinds = {type(p) for p in point}
    if kinds <= {int, Fraction}:
        return Fraction(0)
    if complex in kinds:
        return 0j
    if kinds <= {int, float}:
        return 0.0
    return type(point[0])(0) if point else 0.0


def _convert_coef(c: Fraction, x: list):
    sample = x[0] if x else 0.0
    try:
        return type(sample)(c.numerator) / type(sample)(c.denominator)
    except TypeError:
        return float(c)


def _grlex_key(e: Exponent):
    return (-sum(e), tuple(-p for p in e))


def _monomial_text(e: Exponent, variables: Sequence[str]) -> str:
    factors = []
    for v, p in zip(variables, e):
        if p == 1:
            factors.append(v)
        elif p > 1:
            factors.append(f"{v}^{p}")
    return "*".join(factors)


_TERM_RE = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*(\*?)\s*((?:[A-Za-z_]\w*(?:\^\d+)?)(?:\s*\*\s*[A-Za-z_]\w*(?:\^\d+)?)*)?"
)


def parse_polynomial(text: str, variables: Sequence[str] | None = None) -> SparsePolynomial:
    """Parse ``"+3/2 * x^2*y -4 * z + 1"`` style text (also accepts ``1 - t - u``)."""
    text = text.strip()
    raw_terms: list[tuple[Fraction, dict[str, int]]] = []
    pos = 0
    if text != "0":
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial near {text[pos:pos + 20]!r}")
            sign, coef, star, mono = m.groups()
            if coef is None and mono is None:
                raise ValueError(f"empty term near {text[pos:pos + 20]!r}")
            if coef is not None and mono is not None and not star:
                raise ValueError(f"missing '*' between coefficient and monomial near {text[pos:pos + 20]!r}")
            if raw_terms and sign is None:
                raise ValueError(f"missing sign between terms near {text[pos:pos + 20]!r}")
            c = Fraction(coef) if coef is not None else Fraction(1)
            if sign == "-":
                c = -c
            powers: dict[str, int] = {}
            if mono:
                for factor in mono.split("*"):
                    factor = factor.strip()
                    name, _, p = factor.partition("^")
                    powers[name] = powers.get(name, 0) + (int(p) if p else 1)
            raw_terms.append((c, powers))
            pos = m.end()
    if variables is None:
        seen: list[str] = []
        for _, powers in raw_terms:
            for name in powers:
                if name not in seen:
                    seen.append(name)
        variables = seen
    variables = tuple(variables)
    terms: dict[Exponent, Fraction] = {}
    for c, powers in raw_terms:
        unknown = set(powers) - set(variables)
        if unknown:
            raise UnknownVariable(", ".join(sorted(unknown)))
        e = tuple(powers.get(v, 0) for v in variables)
        terms[e] = terms.get(e, Fraction(0)) + c
    return SparsePolynomial(variables, terms)


class PolynomialSystem:
    """A sequence of polynomials over one shared variable list."""

    def __init__(self, polynomials: Iterable[SparsePolynomial], variables: Sequence[str] | None = None):
        polys = list(polynomials)
        if variables is None:
            if not polys:
                raise ValueError("variables are required for an empty system")
            variables = polys[0].variables
        self.variables = tuple(variables)
        for p in polys:
            if p.variables != self.variables:
                raise DimensionMismatch("all polynomials of a system must share one variable list")
        self.polynomials = tuple(polys)
        self._jacobian: list[list[SparsePolynomial]] | None = None

    def __len__(self) -> int:
        return len(self.polynomials)

    def __iter__(self):
        return iter(self.polynomials)

    def __getitem__(self, k):
        return self.polynomials[k]

    def __eq__(self, other):
        if not isinstance(other, PolynomialSystem):
            return NotImplemented
        return self.variables == other.variables and self.polynomials == other.polynomials

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def is_square(self) -> bool:
        return len(self.polynomials) == self.nvars

    @property
    def degrees(self) -> list[int]:
        return [p.total_degree for p in self.polynomials]

    @property
    def supports(self) -> list[list[Exponent]]:
        return [p.support for p in self.polynomials]

    def evaluate(self, point: Sequence):
        """Componentwise values.  Float/complex input gives a numpy array,
        rational input a list of Fractions, anything else a list."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has length {len(point)}, expected {self.nvars}")
        vals = [p.evaluate(point) for p in self.polynomials]
        if vals and all(isinstance(v, (float, complex)) for v in vals):
            return np.array(vals)
        if not vals:
            return np.zeros(0)
        return vals

    def jacobian(self) -> list[list[SparsePolynomial]]:
        if self._jacobian is None:
            self._jacobian = [[p.diff(v) for v in self.variables] for p in self.polynomials]
        return self._jacobian

    def jacobian_at(self, point: Sequence):
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has length {len(point)}, expected {self.nvars}")
        rows = [[d.evaluate(point) for d in row] for row in self.jacobian()]
        flat = [v for row in rows for v in row]
        if flat and all(isinstance(v, (float, complex)) for v in flat):
            return np.array(rows)
        return rows

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = ["# variables: " + " ".join(self.variables)]
        lines += [p.to_text() for p in self.polynomials]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PolynomialSystem":
        variables = None
        polys = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("variables:"):
                    variables = tuple(body[len("variables:"):].split())
                continue
            if variables is None:
                raise ValueError("text system is missing its '# variables:' header")
            polys.append(parse_polynomial(line, variables))
        if variables is None:
            raise ValueError("text system is missing its '# variables:' header")
        return cls(polys, variables)

    def to_json(self) -> str:
        doc = {"variables": list(self.variables), "polynomials": [p.to_json() for p in self.polynomials]}
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PolynomialSystem":
        doc = json.loads(text)
        variables = tuple(doc["variables"])
        polys = [
            SparsePolynomial(variables, {tuple(e): Fraction(c) for c, e in terms})
            for terms in doc["polynomials"]
        ]
        return cls(polys, variables)

    def dumps(self, fmt: str = "text") -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    @classmethod
    def loads(cls, text: str, fmt: str | None = None) -> "PolynomialSystem":
        if fmt is None:
            fmt = "json" if text.lstrip().startswith("{") else "text"
        return cls.from_json(text) if fmt == "json" else cls.from_text(text)


def evaluate(sys: PolynomialSystem, point: Sequence):
    return sys.evaluate(point)


def jacobian(sys: PolynomialSystem) -> list[list[SparsePolynomial]]:
    return sys.jacobian()


def substitute(p: SparsePolynomial, bindings) -> SparsePolynomial:
    return p.substitute(bindings)


# -- the distance polynomials ---------------------------------------------------


@lru_cache(maxsize=None)
def build_generic_distance_polynomial() -> SparsePolynomial:
    """Squared triple product minus four times the squared cross-product norm.

    Vanishes exactly when the lines ``(xi,yi,zi) + s (ti,ui,vi)`` and
    ``(xj,yj,zj) + s (tj,uj,vj)`` are skew at distance 2 (or parallel).
    """
    xi, yi, zi, ti, ui, vi, xj, yj, zj, tj, uj, vj = SparsePolynomial.generators(GENERIC_VARIABLES)
    dx, dy, dz = xj - xi, yj - yi, zj - zi
    cx = ui * vj - vi * uj
    cy = vi * tj - ti * vj
    cz = ti * uj - ui * tj
    triple = dx * cx + dy * cy + dz * cz
    return triple ** 2 - 4 * (cx ** 2 + cy ** 2 + cz ** 2)


FIXED_AXES = {
    1: {"x": 0, "y": 0, "z": -1, "t": 1, "u": 0, "v": 0},
    2: {"x": 0, "y": 0, "z": 1, "t": 0, "u": 1, "v": 0},
}


def pair_polynomial(i: int, j: int) -> SparsePolynomial:
    """Touching condition for axes ``i < j`` over the free variables of the system.

    Axes 1 and 2 are the fixed orthogonal pair; axes 3..7 have ``z = 0`` and
    ``v = 1 - t - u``.  The result lives over the variables it actually uses,
    named like ``x3, y3, t3, u3``.
    """
    if not (1 <= i < j <= 7) or j < 3:
        raise ValueError(f"no free pair ({i}, {j})")
    generic = build_generic_distance_polynomial()
    bindings: dict[str, object] = {}
    for side, k in (("i", i), ("j", j)):
        if k in FIXED_AXES:
            bindings.update({f"{c}{side}": val for c, val in FIXED_AXES[k].items()})
        else:
            bindings[f"z{side}"] = 0
            bindings[f"v{side}"] = parse_polynomial(f"1 - t{side} - u{side}")
    p = generic.substitute(bindings)
    renamed = p.rename({v: f"{v[0]}{i if v[1] == 'i' else j}" for v in p.variables})
    order = [f"{c}{k}" for k in (i, j) if k not in FIXED_AXES for c in "xytu"]
    return renamed.embed(order)


def littlewood_pairs() -> list[tuple[int, int]]:
    """Pair order of the system: (1, j), then (2, j), then 3 <= i < j <= 7."""
    return [(1, j) for j in FREE_AXES] + [(2, j) for j in FREE_AXES] + list(combinations(FREE_AXES, 2))


def build_littlewood_system() -> PolynomialSystem:
    """The 20 touching conditions in the 20 unknowns ``x_i, y_i, t_i, u_i`` (i = 3..7)."""
    return PolynomialSystem(
        [pair_polynomial(i, j).embed(LITTLEWOOD_VARIABLES) for i, j in littlewood_pairs()],
        LITTLEWOOD_VARIABLES,
    )
