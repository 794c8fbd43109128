"""Published approximate solutions, stored exactly as printed (12 decimals).

Order is (x3, y3, t3, u3, x4, ..., u7).
"""

from __future__ import annotations

from decimal import Decimal, ROUND_DOWN
from fractions import Fraction

FIRST_SOLUTION = (
    "11.675771704477", "-4.124414157636", "0.704116159640", "0.235129952793",
    "3.802878122730", "-2.910611127075", "0.895623427074", "-0.149726023342",
    "8.311818491659", "-1.732276613733", "2.515897624878", "-0.566129665502",
    "-6.487945444917", "-8.537495065091", "0.785632006191", "0.338461562103",
    "-3.168475045360", "-2.459640638529", "0.192767499267", "0.536724141124",
)

SECOND_SOLUTION = (
    "2.075088491891", "-2.036516392124", "-0.030209763440", "0.599691085438",
    "-2.688893665930", "4.070505903499", "0.184499043058", "0.426965115851",
    "-4.033142850644", "-2.655943449984", "0.251380280590", "0.516678258430",
    "6.311134419772", "-5.229892181735", "-0.474742889365", "1.230302197822",
    "3.914613907006", "-7.881492743224", "1.698198197367", "-1.164062857743",
)

FIXTURES = {"first": FIRST_SOLUTION, "second": SECOND_SOLUTION}

# Reported certificate values and diagnostics, used for comparison tables.
PUBLISHED_ALPHA = {
    "first": {"alpha": 4.4333e-2, "beta": 3.1668e-12, "gamma": 1.3999e10, "digits": 12},
    "second": {"alpha": 6.578e-2, "beta": 2.2387e-11, "gamma": 2.9392e9, "digits": 11},
}
PUBLISHED_RESIDUAL_BOUND = 5e-14
PUBLISHED_CONDITION_BOUND = 4.8e4
PUBLISHED_RADIUS = 1e-8
PUBLISHED_IMAG_THRESHOLD = 1e-8
PUBLISHED_MIXED_CELLS = 180_734
PUBLISHED_PATH_COUNT = 121_098_993_664


def fixture_strings(name: str) -> tuple[str, ...]:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def fixture_floats(name: str) -> list[float]:
    return [float(s) for s in fixture_strings(name)]


def fixture_rationals(name: str) -> list[Fraction]:
    return [Fraction(s) for s in fixture_strings(name)]


def truncate(value: str, places: int) -> str:
    """Chop a decimal string to ``places`` digits after the point (toward zero)."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(value).quantize(q, rounding=ROUND_DOWN))


def truncated_fixture(name: str, places: int, overrides: dict[int, int] | None = None) -> list[str]:
    """Fixture with every entry chopped to ``places`` decimals; ``overrides`` maps index -> places."""
    overrides = overrides or {}
    return [truncate(s, overrides.get(k, places)) for k, s in enumerate(fixture_strings(name))]


# Small systems with known roots, used by the homotopy pipeline and the CLI.
TOY_SYSTEMS = {
    "toy": "# variables: x y\n+1 * x^2 +1 * y -1\n+1 * x +1 * y^2 -1\n",
    "imaginary": "# variables: x\n+1 * x^2 +1\n",
}
