import cmath
import math

import pytest

from ribflat.mexpr import parse_expr
from ribflat.weierstrass import WeierstrassData
from ribflat.riccati import catenoid_closed_form, trinoid_closed_form
from ribflat.ribaucour import make_pair

CBRT2 = 2.0 ** (1.0 / 3.0)
OMEGA = cmath.exp(2j * math.pi / 3)
CBRT2_ROOTS = [CBRT2, CBRT2 * OMEGA, CBRT2 * OMEGA.conjugate()]
UNIT_ROOTS = [1.0 + 0j, OMEGA, OMEGA.conjugate()]


@pytest.fixture(scope="session")
def catenoid_W():
    return WeierstrassData(f=parse_expr("1/z^2"), g=parse_expr("z"),
                           punctures=[0], base_point=1.0,
                           base_value=(-1.0, 0.0, 0.0))


@pytest.fixture(scope="session")
def trinoid_W():
    return WeierstrassData(f=parse_expr("1/(z^3-1)^2"), g=parse_expr("z^2"),
                           punctures=UNIT_ROOTS, base_point=0.4)


@pytest.fixture(scope="session")
def catenoid_pair(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    return make_pair(catenoid_W, h, k)


@pytest.fixture(scope="session")
def catenoid_c0_pair(catenoid_W):
    h, k = catenoid_closed_form(3, 0)
    return make_pair(catenoid_W, h, k)


@pytest.fixture(scope="session")
def trinoid_pair(trinoid_W):
    h, k = trinoid_closed_form()
    return make_pair(trinoid_W, h, k)
