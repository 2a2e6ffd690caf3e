import math

import mpmath
import pytest

from stepcat import families

mpmath.mp.dps = 50

SQRT2 = math.sqrt(2.0)


def phi_direct(x, y):
    """Textbook root formula in 50-digit arithmetic."""
    x, y = mpmath.mpf(x), mpmath.mpf(y)
    return float((-x - y + mpmath.sqrt((x + y + 2) ** 2 + 4 * (x + 1) * (y + 1))) / 2)


def psi_direct(x, y):
    x, y = mpmath.mpf(x), mpmath.mpf(y)
    return float((3 - 2 * y + mpmath.sqrt((2 * y + 1) * (2 * y + 8 * x + 9))) / 4)


@pytest.fixture(scope="session")
def fam64():
    return families(64)


@pytest.fixture(scope="session")
def fam256():
    return families(256)
