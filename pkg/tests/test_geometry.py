import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cechnet.geometry import (
    Disk,
    GeometryError,
    Point2,
    Side,
    Tolerance,
    circle_intersection_points,
    common_intersection_nonempty,
    disks_overlap,
    side_of_edge,
)
from cechnet.oracle import grid_common_intersection

TOL = Tolerance(1e-9)

coord = st.floats(-3, 3, allow_nan=False)
radius = st.floats(0.2, 2.0, allow_nan=False)
disks = st.builds(Disk.at, coord, coord, radius)


def test_overlap_examples():
    assert not disks_overlap(Disk.at(0, 0, 1), Disk.at(3, 0, 1), TOL)
    assert disks_overlap(Disk.at(0, 0, 1), Disk.at(1.9, 0, 1), TOL)


def test_overlap_fig2_pair():
    a, b = Disk.at(0.6, 0, 0.6), Disk.at(1.4, 0.15, 0.45)
    # hand value: sqrt(0.8^2 + 0.15^2)
    assert math.dist(a.center, b.center) == pytest.approx(0.81394, abs=1e-5)
    assert disks_overlap(a, b, TOL)


def test_tangent_pair_does_not_overlap():
    assert not disks_overlap(Disk.at(0, 0, 1), Disk.at(2, 0, 1), TOL)
    assert not disks_overlap(Disk.at(0, 0, 1), Disk.at(2 - 1e-12, 0, 1), TOL)


def test_circle_points_tangent():
    pts = circle_intersection_points(Disk.at(0, 0, 1), Disk.at(2, 0, 1), TOL)
    assert len(pts) == 1
    assert pts[0].x == pytest.approx(1.0) and pts[0].y == pytest.approx(0.0)


def test_circle_points_lens():
    pts = sorted(circle_intersection_points(Disk.at(0, 0, 1), Disk.at(1, 0, 1), TOL), key=lambda p: -p.y)
    assert pts[0] == pytest.approx((0.5, math.sqrt(3) / 2))
    assert pts[1] == pytest.approx((0.5, -math.sqrt(3) / 2))


def test_circle_points_disjoint_and_nested():
    assert circle_intersection_points(Disk.at(0, 0, 1), Disk.at(4, 0, 1), TOL) == []
    assert circle_intersection_points(Disk.at(0, 0, 3), Disk.at(0.5, 0, 1), TOL) == []


def test_circle_points_coincident():
    with pytest.raises(GeometryError, match="coincident"):
        circle_intersection_points(Disk.at(1, 1, 1), Disk.at(1, 1, 1), TOL)


def test_common_intersection_single():
    assert common_intersection_nonempty([Disk.at(0, 0, 1)], TOL)


def test_common_intersection_empty_family():
    with pytest.raises(GeometryError, match="empty family"):
        common_intersection_nonempty([], TOL)


def test_common_intersection_three_overlapping():
    family = [Disk.at(0, 0, 1), Disk.at(1, 0, 1), Disk.at(0.5, 0.5, 1)]
    assert grid_common_intersection(family, 1e-3)
    assert common_intersection_nonempty(family, TOL)


def test_rips_cech_witness_triple():
    family = [Disk.at(0, 0, 1.05), Disk.at(2, 0, 1.05), Disk.at(1, 1.732, 1.05)]
    # circumradius of the side-2 equilateral triangle exceeds the radius
    assert 2 / math.sqrt(3) == pytest.approx(1.1547, abs=1e-4)
    assert not grid_common_intersection(family, 1e-3)
    assert not common_intersection_nonempty(family, TOL)
    assert all(disks_overlap(a, b, TOL) for a, b in [(family[0], family[1]), (family[0], family[2]),
                                                       (family[1], family[2])])


def test_common_intersection_nested_disk():
    assert common_intersection_nonempty([Disk.at(0, 0, 3), Disk.at(0.5, 0, 0.2), Disk.at(-1, 0, 2)], TOL)


def test_common_intersection_duplicate_disks():
    d = Disk.at(0, 0, 1)
    assert common_intersection_nonempty([d, d, Disk.at(1.5, 0, 1)], TOL)


def test_side_of_edge_examples():
    a, b = Point2(0, 0), Point2(1, 0)
    assert side_of_edge(Point2(0, 1), a, b, TOL) is Side.LEFT
    assert side_of_edge(Point2(0, -1), a, b, TOL) is Side.RIGHT
    assert side_of_edge(Point2(2, 0), a, b, TOL) is Side.COLINEAR


def test_side_of_edge_degenerate():
    with pytest.raises(GeometryError, match="degenerate edge"):
        side_of_edge(Point2(0, 1), Point2(1, 1), Point2(1, 1), TOL)


def test_invalid_disk():
    with pytest.raises(GeometryError):
        Disk.at(0, 0, -1)
    with pytest.raises(GeometryError):
        Disk.at(float("nan"), 0, 1)


@given(disks, disks)
def test_overlap_symmetric(a, b):
    assert disks_overlap(a, b, TOL) == disks_overlap(b, a, TOL)


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_side_flips_with_edge(p, a, b):
    assume(math.dist(a, b) > 1e-3)
    p, a, b = Point2(*p), Point2(*a), Point2(*b)
    s, t = side_of_edge(p, a, b, TOL), side_of_edge(p, b, a, TOL)
    assert (s is Side.LEFT) == (t is Side.RIGHT)
    assert (s is Side.COLINEAR) == (t is Side.COLINEAR)


@given(disks, disks)
def test_circle_points_on_both_circles(a, b):
    assume(math.dist(a.center, b.center) > 1e-6 or abs(a.radius - b.radius) > 1e-6)
    for p in circle_intersection_points(a, b, TOL):
        # on each circle up to rounding at this coordinate scale
        assert abs(math.dist(p, a.center) - a.radius) <= 1e-6
        assert abs(math.dist(p, b.center) - b.radius) <= 1e-6


@settings(max_examples=200)
@given(st.lists(disks, min_size=2, max_size=6))
def test_monotone_under_subsets(family):
    if common_intersection_nonempty(family, TOL):
        for i in range(len(family)):
            sub = family[:i] + family[i + 1:]
            assert common_intersection_nonempty(sub, TOL)


@settings(max_examples=100, deadline=None)
@given(st.lists(disks, min_size=1, max_size=6))
def test_grid_true_implies_exact_true(family):
    if grid_common_intersection(family, 1e-2):
        assert common_intersection_nonempty(family, TOL)
