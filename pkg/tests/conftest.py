import math

import pytest
from hypothesis import HealthCheck, settings

from littlewood.fixtures import TOY_SYSTEMS, fixture_floats
from littlewood.polysys import PolynomialSystem, build_littlewood_system
from littlewood.refine import newton_refine

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT5 = math.sqrt(5.0)
# x = 1 - y^2 with y(y - 1)(y^2 + y - 1) = 0
TOY_ROOTS = [(0.0, 1.0), (1.0, 0.0)] + [(1.0 - y * y, y) for y in ((-1 + SQRT5) / 2, (-1 - SQRT5) / 2)]


@pytest.fixture(scope="session")
def littlewood():
    return build_littlewood_system()


@pytest.fixture(scope="session")
def refined(littlewood):
    return {name: newton_refine(littlewood, fixture_floats(name))[0] for name in ("first", "second")}


@pytest.fixture(scope="session")
def toy():
    return PolynomialSystem.loads(TOY_SYSTEMS["toy"])


@pytest.fixture(scope="session")
def imaginary():
    return PolynomialSystem.loads(TOY_SYSTEMS["imaginary"])
