import math

import numpy as np
import pytest

from hypnn import geometry, lemma_verify as lv
from hypnn.lemma_verify import BallPairSpec


def test_spec_validation():
    BallPairSpec(2, 3.0, 0.0)
    with pytest.raises(ValueError):
        BallPairSpec(1, 3.0, 1.0)
    with pytest.raises(ValueError):
        BallPairSpec(2, 0.0, 1.0)
    with pytest.raises(ValueError):
        BallPairSpec(2, 3.0, -1.0)


def test_intersection_trivial_cases():
    for d, r in ((2, 1.0), (3, 1.0), (5, 2.0)):
        full = lv.ball_intersection_volume(BallPairSpec(d, r, 0.0))
        assert full == geometry.ball_volume(d, r)
        assert lv.ball_intersection_volume(BallPairSpec(d, r, 2.0 * r)) == 0.0
        assert lv.ball_intersection_volume(
            BallPairSpec(d, r, 2.0 * r + 1.0)) == 0.0


def test_intersection_monotone_in_separation():
    prev = math.inf
    for s in (0.5, 1.0, 2.0, 3.0, 4.0):
        v = lv.ball_intersection_volume(BallPairSpec(2, 2.5, s))
        assert 0.0 <= v < prev
        prev = v


def test_difference_complementarity():
    for d, r, s in ((2, 3.0, 1.0), (3, 2.0, 1.5), (4, 1.5, 0.7)):
        spec = BallPairSpec(d, r, s)
        total = (lv.ball_intersection_volume(spec)
                 + lv.ball_difference_volume(spec))
        assert math.isclose(total, geometry.ball_volume(d, r), rel_tol=1e-10)


def test_difference_value_and_bounds():
    spec = BallPairSpec(2, 3.0, 1.0)
    v = lv.ball_difference_volume(spec)
    assert math.isclose(v, 19.2414587, abs_tol=1e-6)
    a1, a2 = lv.difference_constants(2)
    assert math.isclose(a2 * 1.0 * math.exp(3.0), 40.171, abs_tol=1e-2)
    rep = lv.check_difference_bounds(spec)
    assert rep.passed


def test_difference_mc_agrees_with_quadrature():
    spec = BallPairSpec(3, 2.5, 1.2)
    ref = lv.ball_difference_volume(spec)
    est, hw = lv.ball_difference_volume_mc(spec, 100000, 13)
    assert abs(est - ref) <= hw
    with pytest.raises(ValueError):
        lv.ball_difference_volume_mc(spec, 10, 0)


def test_growth_bounds():
    g, G = lv.growth_constants(2)
    assert math.isclose(g * math.exp(2.0), 7.738, abs_tol=1e-3)
    assert math.isclose(G * math.exp(2.0), 23.213, abs_tol=1e-2)
    for d in range(2, 9):
        rep = lv.check_growth_bounds(d, np.linspace(2.0, 20.0, 37))
        assert rep.passed, rep
    with pytest.raises(ValueError):
        lv.check_growth_bounds(2, np.array([1.5]))


def test_volbou_bounds():
    for d in (4, 5, 6, 7, 8):
        rep = lv.check_volbou(d, np.linspace(0.5, 15.0, 30))
        assert rep.passed, rep
    # only the upper envelope holds in the plane
    rep = lv.check_volbou(2, np.linspace(0.5, 15.0, 30))
    assert rep.passed, rep
    with pytest.raises(ValueError):
        lv.volbou_bounds(3, np.array([1.0]))
    with pytest.raises(ValueError):
        lv.check_volbou(4, np.array([0.0]))


def test_difference_bound_grid():
    for d in (2, 3, 4):
        for r, s in ((3.0, 1.0), (4.0, 2.0), (5.0, 4.0)):
            rep = lv.check_difference_bounds(BallPairSpec(d, r, s))
            assert rep.passed, rep


def test_difference_bound_preconditions():
    with pytest.raises(ValueError):
        lv.check_difference_bounds(BallPairSpec(2, 3.0, 0.0))
    with pytest.raises(ValueError):
        lv.check_difference_bounds(BallPairSpec(2, 3.0, 3.5))
    with pytest.raises(ValueError):
        lv.check_difference_bounds(BallPairSpec(2, 2.0, 1.0))
