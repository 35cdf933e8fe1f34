"""Exact hyperbolic geometry in the hyperboloid (Minkowski) model.

Points of H^d are (d+1)-vectors x with -x0^2 + x1^2 + ... + xd^2 = -1 and
x0 >= 1; the distance is acosh of minus the Minkowski pairing. Ball volumes
are evaluated in closed form by expanding sinh^{d-1} into exponentials.
"""

import math
from dataclasses import dataclass

import numpy as np

# Radii beyond ~700 overflow cosh in double precision; we reject far earlier
# since every experiment in scope stays below r = 30.
MAX_RADIUS = 300.0

NORM_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdSpec:
    """Centring threshold: 'standard' is the v_k(R) sequence, 'logvolume'
    the log-ball-volume variant (k = 1 only)."""
    kind: str = "standard"
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("standard", "logvolume"):
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.kind == "logvolume" and self.k != 1:
            raise ValueError("logvolume threshold is only defined for k = 1")


def check_dimension(d):
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def origin(d):
    """The base point (1, 0, ..., 0) of H^d."""
    p = np.zeros(d + 1)
    p[0] = 1.0
    return p


def is_hpoint(x, tol=NORM_TOL):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3:
        return False
    q = -x[0] * x[0] + np.dot(x[1:], x[1:])
    return bool(abs(q + 1.0) <= tol and x[0] >= 1.0 - tol)


def hpoint(coords):
    """Validate and return hyperboloid coordinates as a float array."""
    x = np.asarray(coords, dtype=float)
    if not is_hpoint(x):
        raise ValueError(f"not a valid hyperboloid point: {coords!r}")
    return x


def minkowski_bilinear(a, b):
    """Minkowski pairing -a0*b0 + a1*b1 + ... + ad*bd."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.dot(a[1:], b[1:]) - a[0] * b[0])


def distance(a, b):
    """Hyperbolic distance acosh(-<a, b>), clamped against rounding below 1."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # identical coordinates give a pairing of -1 only up to rounding, and
    # acosh amplifies that to ~sqrt(eps); short-circuit to an exact zero
    if a is b or np.array_equal(a, b):
        return 0.0
    return math.acosh(max(-minkowski_bilinear(a, b), 1.0))


def distances_from(points, q):
    """Vectorized hyperbolic distances from each row of `points` to q."""
    points = np.asarray(points, dtype=float)
    q = np.asarray(q, dtype=float)
    m = points[:, 1:] @ q[1:] - points[:, 0] * q[0]
    out = np.arccosh(np.maximum(-m, 1.0))
    out[np.all(points == q, axis=1)] = 0.0
    return out


def unit_sphere_area(d):
    """Surface area of the (d-1)-sphere in R^d: 2 pi^{d/2} / Gamma(d/2)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def volume_expansion(d):
    """Exponents and weights for the closed-form ball volume.

    Returns (a, c) with ball_volume(d, r) = sum_j c[j] * E(a[j], r) where
    E(a, r) = (e^{a r} - 1)/a for a != 0 and E(0, r) = r. Derived from
    sinh^{d-1}(u) = 2^{-(d-1)} sum_j binom(d-1, j) (-1)^j e^{(d-1-2j) u}.
    """
    d = check_dimension(d)
    m = d - 1
    w = unit_sphere_area(d) * 0.5 ** m
    a = np.array([float(m - 2 * j) for j in range(m + 1)])
    c = np.array([w * math.comb(m, j) * (-1.0) ** j for j in range(m + 1)])
    return a, c


def _check_radius(r):
    r = float(r)
    if r < 0.0:
        raise ValueError("radius must be nonnegative")
    if r > MAX_RADIUS:
        raise ValueError(f"radius {r} exceeds the overflow guard {MAX_RADIUS}")
    return r


# below this radius the exponential expansion cancels badly; switch to the
# power series in sinh(r), which has only benign alternating terms
_SERIES_RADIUS = 0.75


def _ball_volume_series(d, r):
    # int_0^r sinh^{d-1} = int_0^{sinh r} u^{d-1}/sqrt(1+u^2) du, expanded
    # via the binomial series for 1/sqrt(1+u^2); converges for sinh(r) < 1
    m = d - 1
    s = math.sinh(r)
    s2 = s * s
    coef = 1.0
    p = s ** (m + 1)
    terms = []
    for k in range(200):
        t = coef * p / (m + 1 + 2 * k)
        terms.append(t)
        if abs(t) <= 1e-20 * abs(terms[0]):
            break
        coef *= -(2 * k + 1) / (2 * k + 2)
        p *= s2
    return unit_sphere_area(d) * math.fsum(terms)


def ball_volume(d, r):
    """Volume of a hyperbolic ball: omega_d * int_0^r sinh^{d-1}(u) du,
    evaluated in closed form with compensated summation."""
    if np.ndim(r) != 0:
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        flat = r.ravel()
        of = out.ravel()
        for i in range(flat.size):
            of[i] = ball_volume(d, float(flat[i]))
        return out
    r = _check_radius(r)
    if r <= _SERIES_RADIUS:
        d = check_dimension(d)
        return _ball_volume_series(d, r)
    a, c = volume_expansion(d)
    terms = [c[j] * (math.expm1(a[j] * r) / a[j] if a[j] != 0.0 else r)
             for j in range(len(a))]
    return math.fsum(terms)


def ball_volume_quadrature(d, r, rtol=1e-12):
    """Adaptive-quadrature oracle for ball_volume (same integral, no
    closed form). Kept independent of the expansion path."""
    from scipy.integrate import quad
    d = check_dimension(d)
    r = _check_radius(r)
    if r == 0.0:
        return 0.0
    w = unit_sphere_area(d)
    val, _ = quad(lambda u: math.sinh(u) ** (d - 1), 0.0, r,
                  epsabs=0.0, epsrel=rtol, limit=200)
    return w * val


def ball_volume_derivative(d, r):
    """d/dr ball_volume = omega_d sinh^{d-1}(r)."""
    d = check_dimension(d)
    return unit_sphere_area(d) * np.sinh(np.asarray(r, dtype=float)) ** (d - 1)


def inverse_ball_volume(d, V, rtol=1e-12):
    """Radius r with ball_volume(d, r) = V, via bracketed safeguarded Newton.

    The initial bracket comes from the exponential growth envelopes
    gamma_d e^{r(d-1)} <= V(r) <= Gamma_d e^{r(d-1)} valid for r >= 2.
    """
    d = check_dimension(d)
    V = float(V)
    if V < 0.0:
        raise ValueError("volume must be nonnegative")
    if V == 0.0:
        return 0.0
    w = unit_sphere_area(d)
    gamma = w / (2.0 * (d - 1) * 3.0 ** (d - 1))
    lo, hi = 0.0, max(2.0, math.log(max(V, gamma) / gamma) / (d - 1))
    if hi > MAX_RADIUS:
        raise ValueError("volume exceeds the overflow guard range")
    # initial guess: small-ball power law or large-ball exponential law
    small = (d * V / w) ** (1.0 / d)
    Gamma = w / ((d - 1) * 2.0 ** (d - 1))
    r = small if small < 1.0 else max(1.0, math.log(V / Gamma) / (d - 1))
    r = min(max(r, lo), hi)
    for _ in range(200):
        f = ball_volume(d, r) - V
        if f > 0.0:
            hi = r
        else:
            lo = r
        df = float(ball_volume_derivative(d, r))
        step_ok = df > 0.0
        if step_ok:
            rn = r - f / df
            step_ok = lo < rn < hi
        if not step_ok:
            rn = 0.5 * (lo + hi)
        if abs(rn - r) <= rtol * max(rn, 1e-300):
            return rn
        r = rn
    return r


def threshold(spec, d, R):
    """Centring threshold for the exceedance process at radius R."""
    d = check_dimension(d)
    R = float(R)
    if R <= 0.0:
        raise ValueError("R must be positive")
    if spec.kind == "logvolume":
        return math.log(ball_volume(d, R))
    k = spec.k
    w = unit_sphere_area(d)
    return (R * (d - 1) + (k - 1) * math.log(R * (d - 1))
            - math.log(math.factorial(k - 1) * 2.0 ** (d - 1) * (d - 1) / w))


def intersection_boundary_radius(r, s):
    """Radius of the (d-2)-sphere bounding the intersection of two balls of
    common radius r with centres s apart: acosh(cosh r / cosh(s/2))."""
    r = float(r)
    s = float(s)
    if s < 0.0:
        raise ValueError("separation must be nonnegative")
    if s > 2.0 * r:
        raise ValueError("balls at separation s > 2r have empty intersection boundary")
    return math.acosh(max(math.cosh(r) / math.cosh(0.5 * s), 1.0))


def point_at(direction, t):
    """Exponential map at the origin: (cosh t, sinh t * direction)."""
    u = np.asarray(direction, dtype=float)
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    n = math.sqrt(float(np.dot(u, u)))
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit vector, |u| = {n}")
    return np.concatenate(([math.cosh(t)], math.sinh(t) * u))
