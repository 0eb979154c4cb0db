import numpy as np
import pytest

from ultrafun import Domain, build_level


@pytest.fixture(scope="session")
def unit_interval():
    return Domain.unit(1)


@pytest.fixture(scope="session")
def unit_square():
    return Domain.unit(2)


@pytest.fixture(scope="session")
def rect():
    return Domain((0.0, 0.0), (2.0, 1.0))


@pytest.fixture(scope="session")
def levels(unit_interval, unit_square):
    """Small representative levels, one per family and dimension."""
    return {
        "spectral-1d": build_level(unit_interval, "spectral-sine", 12),
        "spectral-2d": build_level(unit_square, "spectral-sine", 6),
        "fem-1d": build_level(unit_interval, "fem-p1", 4),
        "fem-2d": build_level(unit_square, "fem-p1", 3),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def interior_points(domain, count, rng):
    lo, hi = np.asarray(domain.lower), np.asarray(domain.upper)
    return lo + (0.02 + 0.96 * rng.random((count, domain.dim))) * (hi - lo)


def green_1d(x, q):
    """Green's function of -u'' = delta_q on (0, 1) with zero boundary values."""
    return np.minimum(x, q) * (1.0 - np.maximum(x, q))
