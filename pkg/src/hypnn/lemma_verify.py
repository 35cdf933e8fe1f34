"""Independent oracles for the geometric volume bounds.

The two-ball intersection volume is reduced to a radial integral around one
centre: a sphere of geodesic radius t around z meets the other ball where
cosh(s)cosh(t) - sinh(s)sinh(t)cos(theta) <= cosh(r) (hyperbolic law of
cosines), so the spherical slice is a cap of colatitude theta*(t). The cap
measure follows from int_0^x sin^{d-2}, normalized so that s = 0 reproduces
the ball volume exactly. A uniform-sampling Monte Carlo estimate provides a
second, fully independent route to the same quantity.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import geometry
from .sampling import SeedSpec, sample_directions, sample_radius


@dataclass(frozen=True)
class BallPairSpec:
    d: int
    r: float
    s: float

    def __post_init__(self):
        geometry.check_dimension(self.d)
        if self.r <= 0 or self.r > geometry.MAX_RADIUS:
            raise ValueError("r must lie in (0, MAX_RADIUS]")
        if self.s < 0:
            raise ValueError("s must be nonnegative")


@dataclass
class GofReport:
    name: str
    value: float
    n: int
    threshold: float
    passed: bool


def _sin_power_integral(m, x):
    """int_0^x sin^m(t) dt (m >= 0)."""
    if x <= 0.0:
        return 0.0
    if m == 0:
        return x
    val, _ = quad(lambda t: math.sin(t) ** m, 0.0, x, epsabs=1e-13, epsrel=1e-12)
    return val


def _cap_colatitude(r, s, t):
    """Largest colatitude around the axis z->x for which the point at
    geodesic polar coordinates (t, theta) from z stays inside B(x, r)."""
    if t == 0.0:
        return math.pi if s <= r else 0.0
    num = math.cosh(s) * math.cosh(t) - math.cosh(r)
    den = math.sinh(s) * math.sinh(t)
    a = num / den
    if a <= -1.0:
        return math.pi
    if a >= 1.0:
        return 0.0
    return math.acos(a)


def ball_intersection_volume(spec, rtol=1e-11):
    """Volume of B(z, r) intersect B(x, r) with centres s apart, by nested
    adaptive quadrature; exact ball volume at s = 0, zero beyond s = 2r."""
    d, r, s = spec.d, spec.r, spec.s
    if s == 0.0:
        return geometry.ball_volume(d, r)
    if s >= 2.0 * r:
        return 0.0
    m = d - 2
    full_cap = _sin_power_integral(m, math.pi)
    norm = geometry.unit_sphere_area(d) / full_cap

    def integrand(t):
        theta = _cap_colatitude(r, s, t)
        if theta == 0.0:
            return 0.0
        return math.sinh(t) ** (d - 1) * _sin_power_integral(m, theta)

    # derivative kinks where the cap opens/closes completely
    pts = sorted({t for t in (r - s, s - r) if 0.0 < t < r})
    val, _ = quad(integrand, 0.0, r, points=pts or None,
                  epsabs=0.0, epsrel=rtol, limit=400)
    return norm * val


def ball_difference_volume(spec, rtol=1e-11):
    """Volume of B(z, r) \\ B(x, r)."""
    return max(0.0, geometry.ball_volume(spec.d, spec.r)
               - ball_intersection_volume(spec, rtol=rtol))


def ball_difference_volume_mc(spec, n, seed, confidence=0.99):
    """Monte Carlo oracle: fraction of uniform samples of B(z, r) outside
    B(x, r), scaled by the ball volume. Returns (estimate, ci_halfwidth)."""
    if n < 1000:
        raise ValueError("need at least 1e3 samples")
    d, r, s = spec.d, spec.r, spec.s
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(int(seed))
    rng = seed.rng()
    vol = geometry.ball_volume(d, r)
    x = geometry.point_at(np.eye(d)[0], s)
    outside = 0
    chunk = 1 << 19
    left = n
    while left > 0:
        c = min(chunk, left)
        left -= c
        t = sample_radius(d, r, rng.random(c))
        dirs = sample_directions(d, c, rng)
        coshdist = np.cosh(t) * x[0] - np.sinh(t) * (dirs @ x[1:])
        outside += int(np.count_nonzero(coshdist > math.cosh(r)))
    p = outside / n
    z = {0.99: 2.5758293035489004}.get(confidence)
    if z is None:
        from scipy.stats import norm as _norm
        z = float(_norm.ppf(0.5 + confidence / 2.0))
    return vol * p, z * vol * math.sqrt(p * (1.0 - p) / n)


def growth_constants(d):
    """Explicit envelope constants: gamma_d e^{r(d-1)} <= V(r) <=
    Gamma_d e^{r(d-1)} for r >= 2."""
    w = geometry.unit_sphere_area(d)
    gamma = w / (2.0 * (d - 1) * 3.0 ** (d - 1))
    Gamma = w / ((d - 1) * 2.0 ** (d - 1))
    return gamma, Gamma


def check_growth_bounds(d, r_grid, slack=1e-12):
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 2.0):
        raise ValueError("growth bounds require r >= 2")
    gamma, Gamma = growth_constants(d)
    v = geometry.ball_volume(d, r_grid)
    lo = gamma * np.exp(r_grid * (d - 1))
    hi = Gamma * np.exp(r_grid * (d - 1))
    viol = max(float(np.max((lo - v) / lo)), float(np.max((v - hi) / hi)))
    return GofReport(name=f"growth-bounds-d{d}", value=viol,
                     n=r_grid.size, threshold=slack, passed=viol <= slack)


def volbou_bounds(d, s):
    """Exponential sandwich for the ball volume; the lower bound has a
    (d-3) denominator and is only usable for d >= 4 (and fails for d = 2)."""
    w = geometry.unit_sphere_area(d)
    s = np.asarray(s, dtype=float)
    hi = w * np.exp(s * (d - 1)) / ((d - 1) * 2.0 ** (d - 1))
    if d == 3:
        raise ValueError("lower volbou bound is singular at d = 3")
    lo = w * (np.exp(s * (d - 1)) / ((d - 1) * 2.0 ** (d - 1))
              - (d - 1) * np.exp(s * (d - 3)) / ((d - 3) * 2.0 ** (d - 1)))
    return lo, hi


def check_volbou(d, s_grid, slack=1e-12):
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid <= 0.0):
        raise ValueError("volbou requires s > 0")
    v = geometry.ball_volume(d, s_grid)
    w = geometry.unit_sphere_area(d)
    hi = w * np.exp(s_grid * (d - 1)) / ((d - 1) * 2.0 ** (d - 1))
    viol = float(np.max((v - hi) / hi))
    if d >= 4:
        lo, _ = volbou_bounds(d, s_grid)
        viol = max(viol, float(np.max((lo - v) / np.maximum(np.abs(lo), 1e-300))))
    return GofReport(name=f"volbou-d{d}", value=viol,
                     n=s_grid.size, threshold=slack, passed=viol <= slack)


def difference_constants(d):
    """alpha_1, alpha_2 with alpha_1 s e^{(d-1)(r-s/2)} <= |B(z,r)\\B(x,r)|
    <= alpha_2 s e^{(d-1)r} on 0 < s <= r, r - s/2 >= 2. The d = 2 lower
    constant e^{-3} is assembled from the sinh(t) >= e^{t-3} envelope and is
    conservative, not sharp."""
    w1 = geometry.unit_sphere_area(d - 1) if d >= 2 else 2.0
    alpha2 = w1 / ((d - 1) * 2.0 ** (d - 2))
    if d == 2:
        alpha1 = math.exp(-3.0)
    else:
        alpha1 = w1 / (2.0 * (d - 1) * math.exp(3.0 * (d - 2)))
    return alpha1, alpha2


def check_difference_bounds(spec, slack=1e-9, rtol=1e-11):
    d, r, s = spec.d, spec.r, spec.s
    if not 0.0 < s <= r:
        raise ValueError("bounds require 0 < s <= r")
    if r - s / 2.0 < 2.0:
        raise ValueError("bounds require r - s/2 >= 2")
    alpha1, alpha2 = difference_constants(d)
    lo = alpha1 * s * math.exp((d - 1) * (r - s / 2.0))
    hi = alpha2 * s * math.exp((d - 1) * r)
    v = ball_difference_volume(spec, rtol=rtol)
    viol = max((lo - v) / lo, (v - hi) / hi)
    return GofReport(name=f"difference-bounds-d{d}-r{r}-s{s}", value=viol,
                     n=1, threshold=slack, passed=viol <= slack)
