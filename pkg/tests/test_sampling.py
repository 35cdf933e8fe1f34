import math

import numpy as np
import pytest
from scipy.stats import chisquare

from hypnn import geometry, sampling
from hypnn.sampling import SeedSpec


def test_seedspec_streams():
    a = SeedSpec(7, 0).rng().random(4)
    b = SeedSpec(7, 0).rng().random(4)
    c = SeedSpec(7, 1).rng().random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_poisson_count_zero_mean():
    assert sampling.sample_poisson_count(0.0, SeedSpec(0, 0)) == 0


def test_poisson_count_moments():
    mean = 459.9917
    rng = SeedSpec(1, 0).rng()
    draws = np.array([sampling.sample_poisson_count(mean, rng)
                      for _ in range(10_000)])
    assert abs(draws.mean() - mean) <= 4.0 * math.sqrt(mean / 10_000)
    rng = SeedSpec(2, 0).rng()
    small = np.array([sampling.sample_poisson_count(1.0, rng)
                      for _ in range(100_000)])
    assert abs(np.mean(small == 0) - math.exp(-1.0)) <= 0.006


def test_sample_radius_values():
    assert sampling.sample_radius(2, 5.0, 0.0) == 0.0
    r = sampling.sample_radius(2, 5.0, 0.5)
    ref = math.acosh(1.0 + 0.5 * (math.cosh(5.0) - 1.0))
    assert math.isclose(r, ref, rel_tol=1e-9)
    assert math.isclose(r, 4.32, abs_tol=5e-3)
    # the defining property: the sampled radius encloses u of the volume
    for d in (2, 3, 5):
        for u in (0.05, 0.4, 0.99):
            r = sampling.sample_radius(d, 4.0, u)
            frac = geometry.ball_volume(d, r) / geometry.ball_volume(d, 4.0)
            assert math.isclose(frac, u, rel_tol=1e-8, abs_tol=1e-10)


def test_sample_radius_cdf():
    rng = SeedSpec(3, 0).rng()
    u = rng.random(100_000)
    r = np.array(sampling.sample_radius(2, 5.0, u))
    grid = np.linspace(0.1, 4.9, 25)
    vmax = geometry.ball_volume(2, 5.0)
    for t in grid:
        emp = np.mean(r <= t)
        ref = geometry.ball_volume(2, float(t)) / vmax
        assert abs(emp - ref) <= 0.006


def test_sample_directions():
    dirs = sampling.sample_directions(2, 100_000, SeedSpec(4, 0))
    norms = np.linalg.norm(dirs, axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-12)
    assert np.linalg.norm(dirs.mean(axis=0)) <= 4.0 * math.sqrt(2) / \
        math.sqrt(100_000)
    ang = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * math.pi)
    hist, _ = np.histogram(ang, bins=36, range=(0.0, 2 * math.pi))
    assert chisquare(hist).pvalue > 1e-3
    single = sampling.sample_direction(3, SeedSpec(5, 0))
    assert single.shape == (3,)
    assert math.isclose(np.linalg.norm(single), 1.0, abs_tol=1e-12)


def test_sample_ball_process_empty():
    batch = sampling.sample_ball_process(2, 0.0, SeedSpec(6, 0))
    assert batch.realized_count == 0
    assert batch.points.shape == (0, 3)


def test_sample_ball_process_points_valid():
    batch = sampling.sample_ball_process(3, 4.0, SeedSpec(7, 0))
    pts = batch.points
    assert batch.realized_count == pts.shape[0]
    assert pts.shape[1] == 4
    for p in pts[:200]:
        assert geometry.is_hpoint(p)
    radial = np.arccosh(np.maximum(pts[:, 0], 1.0))
    assert radial.max() <= 4.0 + 1e-9


def test_sample_ball_process_count_law():
    mean = geometry.ball_volume(2, 5.0)
    counts = [sampling.sample_ball_process(2, 5.0, SeedSpec(8, i)).realized_count
              for i in range(500)]
    avg = float(np.mean(counts))
    assert abs(avg - mean) <= 4.0 * math.sqrt(mean / 500)


def test_sample_ball_process_deterministic():
    a = sampling.sample_ball_process(2, 4.0, SeedSpec(9, 3)).points
    b = sampling.sample_ball_process(2, 4.0, SeedSpec(9, 3)).points
    assert np.array_equal(a, b)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sampling.sample_poisson_count(-1.0, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        sampling.sample_radius(2, 5.0, 1.5)
    with pytest.raises(ValueError):
        sampling.sample_ball_process(1, 5.0, SeedSpec(0, 0))
