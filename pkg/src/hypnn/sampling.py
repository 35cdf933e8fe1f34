"""Seeded sampling of the unit-intensity Poisson process on hyperbolic balls.

A ball restricted process is a Poisson count with mean equal to the ball
volume, plus that many iid points with radial CDF proportional to the ball
volume and isotropic direction. Each replication owns an independent
substream derived from (master_seed, stream_id), so results are bit-for-bit
reproducible regardless of scheduling.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .backend import kernels


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def rng(self):
        # SeedSequence mixes (entropy, spawn_key) through a 128-bit hash,
        # so distinct stream_ids never share generator state
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)


@dataclass
class SampleBatch:
    points: np.ndarray      # (n, d+1) hyperboloid coordinates
    region_radius: float
    realized_count: int


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.rng()
    return SeedSpec(int(seed)).rng()


def sample_poisson_count(mean, seed):
    """One Poisson(mean) draw. numpy uses exact inversion for small means
    and a transformed-rejection method for large ones."""
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    return int(_as_rng(seed).poisson(mean))


def sample_radius(d, rmax, u):
    """Map uniform variates u in [0, 1) to radii with CDF
    ball_volume(d, t) / ball_volume(d, rmax)."""
    d = geometry.check_dimension(d)
    if rmax <= 0:
        raise ValueError("rmax must be positive")
    vmax = geometry.ball_volume(d, rmax)
    a, c = geometry.volume_expansion(d)
    w = geometry.unit_sphere_area(d)
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0.0) or np.any(u >= 1.0):
        raise ValueError("uniform variates must lie in [0, 1)")
    V = u * vmax
    r = kernels().invert_volume(d, w, a, c, V, 1e-12)
    return float(r[0]) if scalar else r


def sample_direction(d, seed):
    """Isotropic unit vector in R^d (normalized standard Gaussians)."""
    return sample_directions(d, 1, seed)[0]


def sample_directions(d, n, seed):
    d = geometry.check_dimension(d)
    rng = _as_rng(seed)
    g = rng.standard_normal((n, d))
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    # a vector of all-underflow Gaussians has probability ~0; resample guard
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    return g / norms[:, None]


def sample_ball_process(d, rmax, seed):
    """Poisson process of unit intensity restricted to the ball B_rmax."""
    d = geometry.check_dimension(d)
    rmax = float(rmax)
    if not 0.0 <= rmax <= geometry.MAX_RADIUS:
        raise ValueError(f"rmax must lie in [0, {geometry.MAX_RADIUS}]")
    rng = _as_rng(seed)
    vmax = geometry.ball_volume(d, rmax)
    n = int(rng.poisson(vmax))
    pts = np.empty((n, d + 1))
    if n:
        a, c = geometry.volume_expansion(d)
        w = geometry.unit_sphere_area(d)
        V = rng.random(n) * vmax
        r = kernels().invert_volume(d, w, a, c, V, 1e-12)
        dirs = sample_directions(d, n, rng)
        pts[:, 0] = np.cosh(r)
        pts[:, 1:] = np.sinh(r)[:, None] * dirs
    return SampleBatch(points=pts, region_radius=rmax, realized_count=n)
