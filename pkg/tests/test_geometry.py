"""Exact planar predicates: crossing classification, triangles, affine maps."""

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tribraid.geometry import (
    CROSS,
    DISJOINT,
    OVERLAP,
    TOUCH,
    Affine,
    bbox,
    direction_key,
    in_open_segment,
    line_intersection,
    linf_point_segment,
    on_segment,
    orient,
    point_in_triangle,
    segment_hits_triangle,
    segment_meet,
    segments_cross,
    triangles_overlap,
)


def P(x, y):
    return (F(x), F(y))


coords = st.fractions(min_value=-4, max_value=4, max_denominator=8)
points = st.tuples(coords, coords)


# ---------------------------------------------------------------------------
# orientation and incidence


def test_orient_signs():
    assert orient(P(0, 0), P(1, 0), P(0, 1)) == 1
    assert orient(P(0, 0), P(0, 1), P(1, 0)) == -1
    assert orient(P(0, 0), P(1, 1), P(2, 2)) == 0


@given(points, points, points)
def test_orient_antisymmetry(a, b, c):
    assert orient(a, b, c) == -orient(b, a, c)


def test_on_segment_interior_and_ends():
    seg = (P(0, 0), P(4, 2))
    assert on_segment(P(2, 1), seg)
    assert on_segment(P(0, 0), seg) and on_segment(P(4, 2), seg)
    assert not on_segment(P(2, 2), seg)
    assert not on_segment(P(6, 3), seg)  # collinear but outside
    assert in_open_segment(P(2, 1), seg)
    assert not in_open_segment(P(0, 0), seg)


def test_on_segment_needs_no_rounding():
    # a point that floats would misplace
    seg = (P(0, 0), P(3, 1))
    assert on_segment((F(1), F(1, 3)), seg)
    assert not on_segment((F(1), F(1, 3) + F(1, 10**12)), seg)


# ---------------------------------------------------------------------------
# segment intersection classification


def test_segment_meet_cross():
    kind, p = segment_meet((P(0, 0), P(2, 2)), (P(0, 2), P(2, 0)))
    assert kind == CROSS and p == P(1, 1)


def test_segment_meet_touch_at_endpoint():
    kind, p = segment_meet((P(0, 0), P(1, 1)), (P(1, 1), P(2, 0)))
    assert kind == TOUCH and p == P(1, 1)


def test_segment_meet_touch_endpoint_on_interior():
    # ends exactly on the other segment's interior: TOUCH, never CROSS
    kind, p = segment_meet((P(0, 0), P(2, 0)), (P(1, 0), P(1, 5)))
    assert kind == TOUCH and p == P(1, 0)


def test_segment_meet_disjoint_near_miss():
    kind, p = segment_meet((P(0, 0), P(1, 0)), (P(0, F(1, 1000)), P(1, F(1, 1000))))
    assert kind == DISJOINT and p is None


def test_segment_meet_collinear_overlap_and_touch():
    kind, _ = segment_meet((P(0, 0), P(2, 0)), (P(1, 0), P(3, 0)))
    assert kind == OVERLAP
    kind, p = segment_meet((P(0, 0), P(1, 0)), (P(1, 0), P(2, 0)))
    assert kind == TOUCH and p == P(1, 0)
    kind, _ = segment_meet((P(0, 0), P(1, 0)), (P(2, 0), P(3, 0)))
    assert kind == DISJOINT


def test_vertical_collinear_overlap():
    kind, _ = segment_meet((P(0, 0), P(0, 2)), (P(0, 1), P(0, 3)))
    assert kind == OVERLAP


@given(points, points, points, points)
@settings(max_examples=200)
def test_segment_meet_symmetric(a, b, c, d):
    assume(a != b and c != d)  # documented domain: nondegenerate segments
    k1, p1 = segment_meet((a, b), (c, d))
    k2, p2 = segment_meet((c, d), (a, b))
    assert k1 == k2 and p1 == p2


@given(points, points, points, points)
@settings(max_examples=200)
def test_cross_point_lies_on_both(a, b, c, d):
    assume(a != b and c != d)
    kind, p = segment_meet((a, b), (c, d))
    if kind == CROSS:
        assert in_open_segment(p, (a, b)) and in_open_segment(p, (c, d))
        assert segments_cross((a, b), (c, d))
    elif kind == TOUCH:
        assert on_segment(p, (a, b)) and on_segment(p, (c, d))


def test_line_intersection_parallel():
    assert line_intersection(P(0, 0), P(1, 0), P(0, 1), P(1, 1)) is None
    assert line_intersection(P(0, 0), P(1, 1), P(2, 0), P(3, 1)) is None


# ---------------------------------------------------------------------------
# triangles


TRI = (P(0, 0), P(4, 0), P(0, 4))


def test_point_in_triangle_regions():
    assert point_in_triangle(P(1, 1), TRI)
    assert point_in_triangle(P(1, 1), TRI, strict=True)
    assert point_in_triangle(P(2, 0), TRI)           # edge
    assert not point_in_triangle(P(2, 0), TRI, strict=True)
    assert point_in_triangle(P(0, 0), TRI)           # corner
    assert not point_in_triangle(P(3, 3), TRI)


def test_triangles_overlap_interior_only():
    # sharing an edge is not interior overlap
    other = (P(4, 0), P(0, 4), P(4, 4))
    assert not triangles_overlap(TRI, other)
    shifted = (P(1, 1), P(5, 1), P(1, 5))
    assert triangles_overlap(TRI, shifted)
    assert triangles_overlap(shifted, TRI)
    far = (P(10, 10), P(11, 10), P(10, 11))
    assert not triangles_overlap(TRI, far)


def test_triangle_containment_counts_as_overlap():
    inner = (P(1, 1), P(2, 1), P(1, 2))
    assert triangles_overlap(TRI, inner)
    assert triangles_overlap(inner, TRI)


def test_segment_hits_triangle():
    assert segment_hits_triangle((P(-1, 1), P(5, 1)), TRI)
    assert segment_hits_triangle((P(1, 1), P(2, 2)), TRI)      # inside
    assert not segment_hits_triangle((P(5, 5), P(6, 6)), TRI)
    # touching a corner from outside has no interior in common
    assert not segment_hits_triangle((P(4, 0), P(6, 0)), TRI)


# ---------------------------------------------------------------------------
# affine maps


def test_affine_identity_and_translation():
    f = Affine.identity()
    assert f(P(3, 5)) == P(3, 5)
    g = Affine.translation(2, -1)
    assert g(P(3, 5)) == P(5, 4)
    assert g.det() == 1 and g.is_orientation_preserving()


def test_affine_scaling_about_center():
    f = Affine.scaling(F(3, 2), center=P(2, 2))
    assert f(P(2, 2)) == P(2, 2)
    assert f(P(4, 2)) == P(5, 2)
    with pytest.raises(ValueError):
        Affine.scaling(0)
    with pytest.raises(ValueError):
        Affine.scaling(-2)


def test_affine_shears():
    assert Affine.shear_x(F(1, 2))(P(2, 4)) == P(4, 4)
    assert Affine.shear_y(3)(P(2, 4)) == P(2, 10)
    assert Affine.shear_x(7).det() == 1


def test_pythagorean_rotation_exact():
    r = Affine.pythagorean_rotation((3, 4, 5))
    assert r(P(5, 0)) == P(3, 4)
    assert r.det() == 1
    # a quarter of nothing: bad triples rejected
    for bad in ((1, 1, 2), (3, 4, -5), (0, 0, 0)):
        with pytest.raises(ValueError):
            Affine.pythagorean_rotation(bad)


def test_pythagorean_rotation_half_turn():
    r = Affine.pythagorean_rotation((-1, 0, 1), center=P(1, 1))
    assert r(P(0, 0)) == P(2, 2)
    assert r(P(1, 1)) == P(1, 1)


def test_rotations_compose_exactly():
    """Rational rotations compose to the rational rotation of the angle sum."""
    a = Affine.pythagorean_rotation((3, 4, 5))
    b = Affine.pythagorean_rotation((5, 12, 13))
    ab = a.then(b)
    # cos/sin addition: (3/5, 4/5) * (5/13, 12/13) -> (-33/65, 56/65)
    assert ab.m == (F(-33, 65), F(-56, 65), F(56, 65), F(-33, 65))
    assert ab.det() == 1


def test_then_is_composition():
    f = Affine.shear_x(2)
    g = Affine.translation(1, 1)
    p = P(3, 4)
    assert f.then(g)(p) == g(f(p))
    assert g.then(f)(p) == f(g(p))


@given(points)
def test_rotation_inverse_round_trip(p):
    r = Affine.pythagorean_rotation((3, 4, 5))
    rinv = Affine.pythagorean_rotation((3, -4, 5))
    assert rinv(r(p)) == p


# ---------------------------------------------------------------------------
# helpers


def test_direction_key_orders_counterclockwise():
    dirs = [(F(1), F(0)), (F(2), F(1)), (F(0), F(1)), (F(-1), F(0)),
            (F(0), F(-1)), (F(1), F(-1))]
    ordered = sorted(dirs, key=direction_key)
    assert ordered.index((F(1), F(0))) < ordered.index((F(2), F(1)))
    assert ordered.index((F(2), F(1))) < ordered.index((F(0), F(1)))
    assert ordered.index((F(0), F(1))) < ordered.index((F(-1), F(0)))
    assert ordered.index((F(-1), F(0))) < ordered.index((F(0), F(-1)))


def test_bbox():
    lo_x, lo_y, hi_x, hi_y = bbox([P(1, 5), P(-2, 3), P(4, -1)])
    assert (lo_x, lo_y, hi_x, hi_y) == (F(-2), F(-1), F(4), F(5))


def test_linf_point_segment():
    seg = (P(0, 0), P(10, 0))
    assert linf_point_segment(P(5, 3), seg) == 3
    assert linf_point_segment(P(0, 0), seg) == 0
    assert linf_point_segment(P(-2, 0), seg) == 2
