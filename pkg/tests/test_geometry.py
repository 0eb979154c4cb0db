import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultrafun import Domain, DomainError, Membership, boundary_distance, contains


@pytest.mark.parametrize(
    "p, expected",
    [((0.5, 0.5), Membership.INTERIOR), ((0.0, 0.3), Membership.BOUNDARY), ((1.5, 0.5), Membership.EXTERIOR)],
)
def test_contains_examples(unit_square, p, expected):
    assert contains(unit_square, p) is expected


@pytest.mark.parametrize(
    "dom, p, expected",
    [(Domain.unit(2), (0.5, 0.5), 0.5), (Domain.unit(2), (0.1, 0.4), 0.1), (Domain.unit(1), (0.25,), 0.25)],
)
def test_boundary_distance_examples(dom, p, expected):
    assert boundary_distance(dom, p) == pytest.approx(expected, abs=1e-15)


def test_invalid_domains():
    with pytest.raises(DomainError, match="axis 1"):
        Domain((0.0, 1.0), (1.0, 1.0))
    with pytest.raises(DomainError):
        Domain((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


def test_point_validation(unit_square):
    with pytest.raises(DomainError, match="dim"):
        contains(unit_square, (0.5,))
    with pytest.raises(DomainError, match="finite"):
        contains(unit_square, (np.nan, 0.5))
    with pytest.raises(DomainError):
        boundary_distance(unit_square, (2.0, 0.5))


coord = st.floats(-1.0, 2.0, allow_nan=False)


@given(coord, coord)
def test_membership_partition_and_distance(x, y):
    d = Domain.unit(2)
    cls = contains(d, (x, y))
    assert cls in tuple(Membership)
    if cls is Membership.EXTERIOR:
        with pytest.raises(DomainError):
            boundary_distance(d, (x, y))
    elif cls is Membership.BOUNDARY:
        assert boundary_distance(d, (x, y)) == 0.0
    else:
        assert boundary_distance(d, (x, y)) > 0.0


def test_boundary_samples_are_on_boundary(unit_square, rect):
    for d in (unit_square, rect, Domain.unit(1)):
        pts = d.boundary_samples(20)
        assert len(pts) == 20
        assert all(d.contains(p) is Membership.BOUNDARY for p in pts)
