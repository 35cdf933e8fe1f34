import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypnn import geometry
from hypnn.geometry import ThresholdSpec


def test_origin_and_membership():
    for d in range(2, 9):
        o = geometry.origin(d)
        assert o.shape == (d + 1,)
        assert o[0] == 1.0
        assert geometry.is_hpoint(o)
    assert not geometry.is_hpoint(np.array([2.0, 0.0, 0.0]))
    assert not geometry.is_hpoint(np.array([-1.0, 0.0, 0.0]))


def test_hpoint_validates():
    p = geometry.hpoint([math.cosh(1.0), math.sinh(1.0), 0.0])
    assert geometry.is_hpoint(p)
    with pytest.raises(ValueError):
        geometry.hpoint([1.5, 0.0, 0.0])


def test_minkowski_bilinear_values():
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([math.cosh(2.0), math.sinh(2.0), 0.0])
    assert math.isclose(geometry.minkowski_bilinear(a, b), -math.cosh(2.0),
                        rel_tol=1e-12)
    c = np.array([math.cosh(1.0), math.sinh(1.0), 0.0])
    e = np.array([math.cosh(1.0), -math.sinh(1.0), 0.0])
    # cosh^2 + sinh^2 = cosh 2
    assert math.isclose(geometry.minkowski_bilinear(c, e), -math.cosh(2.0),
                        rel_tol=1e-12)


def test_distance_values():
    c = np.array([math.cosh(1.0), math.sinh(1.0), 0.0])
    e = np.array([math.cosh(1.0), -math.sinh(1.0), 0.0])
    assert geometry.distance(c, c) == 0.0
    assert math.isclose(geometry.distance(c, e), 2.0, rel_tol=1e-12)


def test_distances_from_matches_scalar():
    rng = np.random.default_rng(3)
    pts = np.array([geometry.point_at(v / np.linalg.norm(v), t)
                    for v, t in zip(rng.standard_normal((20, 2)),
                                    rng.random(20) * 3)])
    q = geometry.point_at(np.array([1.0, 0.0]), 0.7)
    batch = geometry.distances_from(pts, q)
    for i in range(len(pts)):
        assert math.isclose(batch[i], geometry.distance(pts[i], q),
                            rel_tol=1e-12, abs_tol=1e-12)


def test_unit_sphere_area():
    assert math.isclose(geometry.unit_sphere_area(2), 2 * math.pi,
                        rel_tol=1e-14)
    assert math.isclose(geometry.unit_sphere_area(3), 4 * math.pi,
                        rel_tol=1e-14)
    for d in range(2, 9):
        w = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        assert math.isclose(geometry.unit_sphere_area(d), w, rel_tol=1e-13)


def test_ball_volume_values():
    assert geometry.ball_volume(2, 0.0) == 0.0
    assert math.isclose(geometry.ball_volume(2, 1.0),
                        2 * math.pi * (math.cosh(1.0) - 1.0), rel_tol=1e-13)
    assert math.isclose(geometry.ball_volume(3, 1.0),
                        math.pi * (math.sinh(2.0) - 2.0), rel_tol=1e-13)
    assert math.isclose(geometry.ball_volume(2, 5.0), 459.9917,
                        rel_tol=1e-6)


def test_ball_volume_array_matches_scalar():
    r = np.linspace(0.0, 8.0, 17)
    batch = geometry.ball_volume(4, r)
    for i, t in enumerate(r):
        assert batch[i] == geometry.ball_volume(4, float(t))


def test_ball_volume_against_quadrature():
    for d in range(2, 9):
        for r in (0.1, 0.5, 1.0, 3.0, 7.5, 15.0):
            ref = geometry.ball_volume_quadrature(d, r)
            got = geometry.ball_volume(d, r)
            assert math.isclose(got, ref, rel_tol=1e-10), (d, r)


def test_ball_volume_rejects_bad_input():
    with pytest.raises(ValueError):
        geometry.ball_volume(1, 1.0)
    with pytest.raises(ValueError):
        geometry.ball_volume(2, -0.5)
    with pytest.raises(ValueError):
        geometry.ball_volume(2, geometry.MAX_RADIUS + 1.0)


def test_inverse_ball_volume_values():
    assert geometry.inverse_ball_volume(2, 0.0) == 0.0
    assert math.isclose(geometry.inverse_ball_volume(2, 3.412283), 1.0,
                        abs_tol=1e-6)
    r = geometry.inverse_ball_volume(
        2, float(geometry.ball_volume(2, 1.0)))
    assert math.isclose(r, 1.0, abs_tol=1e-9)


def test_inverse_roundtrip_grid():
    for d in range(2, 9):
        for r in (0.1, 0.7, 2.0, 6.0, 15.0):
            V = float(geometry.ball_volume(d, r))
            back = geometry.inverse_ball_volume(d, V)
            assert math.isclose(back, r, rel_tol=1e-9, abs_tol=1e-9), (d, r)


def test_threshold_values():
    assert math.isclose(
        geometry.threshold(ThresholdSpec("standard", 1), 2, 10.0),
        10.0 + math.log(math.pi), rel_tol=1e-12)
    assert math.isclose(
        geometry.threshold(ThresholdSpec("standard", 2), 2, 10.0),
        10.0 + math.log(10.0) + math.log(math.pi), rel_tol=1e-12)
    assert math.isclose(
        geometry.threshold(ThresholdSpec("standard", 1), 3, 10.0),
        20.0 - math.log(2.0 / math.pi), rel_tol=1e-12)
    lv = geometry.threshold(ThresholdSpec("logvolume", 1), 2, 10.0)
    assert math.isclose(lv, math.log(2 * math.pi * (math.cosh(10.0) - 1.0)),
                        rel_tol=1e-12)
    # the log-volume centring approaches the standard one for large R
    assert abs(lv - (10.0 + math.log(math.pi))) < 1e-4


def test_threshold_spec_validation():
    with pytest.raises(ValueError):
        ThresholdSpec("logvolume", 2)
    with pytest.raises(ValueError):
        ThresholdSpec("standard", 0)
    with pytest.raises(ValueError):
        ThresholdSpec("other", 1)


def test_intersection_boundary_radius():
    got = geometry.intersection_boundary_radius(3.0, 1.0)
    assert math.isclose(got, 2.879210, abs_tol=1e-6)
    # lower bound on the bisector radius in the admissible regime
    for r in np.linspace(2.5, 12.0, 12):
        for s in np.linspace(0.1, 1.0, 5):
            if r - s / 2.0 < 2.0:
                continue
            assert geometry.intersection_boundary_radius(r, s) >= r - s / 2.0


def test_point_at():
    v = np.array([0.6, 0.8])
    assert np.allclose(geometry.point_at(v, 0.0), geometry.origin(2))
    p1 = geometry.point_at(v, 1.2)
    p2 = geometry.point_at(v, 2.9)
    assert geometry.is_hpoint(p1)
    assert math.isclose(geometry.distance(p1, p2), 1.7, abs_tol=1e-10)


@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0),
       st.floats(0.0, 2 * math.pi))
@settings(max_examples=80, deadline=None)
def test_triangle_inequality(t1, t2, ang):
    u = np.array([1.0, 0.0])
    v = np.array([math.cos(ang), math.sin(ang)])
    a = geometry.point_at(u, t1)
    b = geometry.point_at(v, t2)
    o = geometry.origin(2)
    dab = geometry.distance(a, b)
    assert dab <= geometry.distance(a, o) + geometry.distance(o, b) + 1e-9
    assert math.isclose(dab, geometry.distance(b, a), rel_tol=1e-12,
                        abs_tol=1e-12)


@given(st.integers(2, 8), st.floats(1e-3, 20.0))
@settings(max_examples=60, deadline=None)
def test_inverse_roundtrip_property(d, r):
    V = float(geometry.ball_volume(d, r))
    assert math.isclose(geometry.inverse_ball_volume(d, V), r,
                        rel_tol=1e-9, abs_tol=1e-9)
