import math

import pytest

from schmidtlab.torus import (
    RADIUS_CAP,
    Ball,
    Point,
    ball_from_obj,
    ball_to_obj,
    ball_volume,
    balls_disjoint,
    balls_intersect,
    contains_ball,
    distance,
    pack_disjoint_subballs,
    wrap,
    wrap_diff,
)


def B(c, r):
    return Ball(Point.of(*c) if isinstance(c, tuple) else Point.of(c), r)


def test_wrap_into_unit_interval():
    assert wrap(0.3) == pytest.approx(0.3)
    assert wrap(1.3) == pytest.approx(0.3)
    assert wrap(-0.25) == pytest.approx(0.75)
    assert 0.0 <= wrap(math.pi) < 1.0


def test_wrap_diff_shortest_arc():
    assert wrap_diff(0.9, 0.1) == pytest.approx(-0.2)
    assert abs(wrap_diff(0.0, 0.5)) == pytest.approx(0.5)
    assert wrap_diff(0.25, 0.25) == 0.0


def test_distance_crosses_seam():
    assert distance(Point.of(0.95), Point.of(0.05)) == pytest.approx(0.1)
    d = distance(Point.of(0.9, 0.9), Point.of(0.1, 0.1))
    assert d == pytest.approx(math.hypot(0.2, 0.2))


def test_radius_cap_enforced():
    with pytest.raises(ValueError):
        B(0.5, 0.3)
    with pytest.raises(ValueError):
        B(0.5, 0.0)
    B(0.5, RADIUS_CAP)  # boundary allowed


def test_point_dimension_mismatch():
    with pytest.raises(ValueError):
        distance(Point.of(0.5), Point.of(0.5, 0.5))


def test_containment_boundary_counts():
    outer = B(0.5, 0.2)
    assert contains_ball(outer, B(0.5, 0.2))
    assert contains_ball(outer, B(0.6, 0.1))  # touches from inside
    assert not contains_ball(outer, B(0.6, 0.1000001))
    # seam crossing
    assert contains_ball(B(0.0, 0.2), B(0.95, 0.1))


def test_disjoint_tangency_counts_as_disjoint():
    # dyadic centers so the tangency distance is exactly representable
    assert balls_disjoint(B(0.25, 0.125), B(0.5, 0.125))
    assert not balls_disjoint(B(0.25, 0.125), B(0.4375, 0.125))
    assert balls_intersect(B(0.25, 0.125), B(0.4375, 0.125))


def test_volume():
    assert ball_volume(B(0.5, 0.1)) == pytest.approx(0.2)
    assert ball_volume(B((0.5, 0.5), 0.1)) == pytest.approx(math.pi * 0.01)


@pytest.mark.parametrize("beta,count", [(0.1, 9), (0.01, 99), (0.19, 5),
                                        (0.2, 4), (0.9, 1)])
def test_packing_counts_circle(beta, count):
    got = pack_disjoint_subballs(B(0.5, 0.25), beta)
    assert len(got) == count


def test_packing_verified_properties():
    outer = B(0.3, 0.2)
    subs = pack_disjoint_subballs(outer, 0.14)
    for s in subs:
        assert s.radius == pytest.approx(0.14 * outer.radius)
        assert contains_ball(outer, s)
    for i in range(len(subs)):
        for j in range(i + 1, len(subs)):
            assert balls_disjoint(subs[i], subs[j])


def test_packing_count_lower_bound_guarantee():
    # floor(1/(2 beta))^u is the documented floor for any center and radius
    for beta in (0.1, 0.07, 0.25, 0.33):
        for r in (0.25, 1e-3, 1e-9):
            got = pack_disjoint_subballs(B(math.pi / 10 % 1, r), beta)
            assert len(got) >= math.floor(1.0 / (2.0 * beta))


def test_packing_torus():
    subs = pack_disjoint_subballs(B((0.5, 0.5), 0.25), 0.1)
    assert len(subs) == 69
    for s in subs:
        assert contains_ball(B((0.5, 0.5), 0.25), s)


def test_packing_scale_invariance_of_count():
    big = pack_disjoint_subballs(B(0.5, 0.25), 0.1)
    small = pack_disjoint_subballs(B(0.5, 2.2e-12), 0.1)
    assert len(big) == len(small)


def test_ball_roundtrip():
    b = B((0.1, 0.9), 0.05)
    assert ball_from_obj(ball_to_obj(b)) == b
