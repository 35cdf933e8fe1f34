"""Exact reference laws and statistical comparison machinery.

The finite-R mean of the exceedance process has a closed form (an exact
identity, no asymptotics): E xi_R((u, inf)) = V(B_R) e^{-(u+v)}
sum_{l<k} (u+v)^l / l! with v the centring threshold. Everything here is
computed in the log domain since u + v is typically 10..30.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from . import geometry


@dataclass
class IntensityCurve:
    grid: np.ndarray
    exact: np.ndarray
    empirical_mean: np.ndarray
    empirical_ci_halfwidth: np.ndarray
    confidence: float


@dataclass
class GofReport:
    name: str
    value: float
    n: int
    threshold: float
    passed: bool


def exact_exceedance_mean(d, k, R, spec, u):
    """Exact mean number of exceedance heights above u at finite R."""
    v = geometry.threshold(spec, d, R)
    x = u + v
    if x <= 0:
        raise ValueError("u + threshold must be positive")
    log_vol = math.log(geometry.ball_volume(d, R))
    log_sum = logsumexp([l * math.log(x) - math.lgamma(l + 1)
                         for l in range(k)])
    return math.exp(log_vol - x + log_sum)


def intensity_density(d, k, R, u):
    """Lebesgue density of the exceedance mean measure (standard
    threshold): e^{-u} V(B_R) 2^{d-1}(d-1) e^{-R(d-1)} (u+v)^{k-1}
    / (omega_d (R(d-1))^{k-1})."""
    spec = geometry.ThresholdSpec("standard", k)
    v = geometry.threshold(spec, d, R)
    if u + v <= 0:
        raise ValueError("u + threshold must be positive")
    w = geometry.unit_sphere_area(d)
    lg = (-u + math.log(geometry.ball_volume(d, R))
          + (d - 1) * math.log(2.0) + math.log(d - 1) - R * (d - 1)
          + (k - 1) * (math.log(u + v) - math.log(R * (d - 1)))
          - math.log(w))
    return math.exp(lg)


def gumbel_cdf(c):
    """Standard Gumbel law exp(-e^{-c})."""
    out = np.exp(-np.exp(-np.asarray(c, dtype=float)))
    return float(out) if out.ndim == 0 else out


def gumbel_quantile(p):
    return -np.log(-np.log(p))


def poisson_logpmf(lam, n):
    if lam < 0 or n < 0:
        raise ValueError("lambda and n must be nonnegative")
    if lam == 0.0:
        return 0.0 if n == 0 else -math.inf
    return n * math.log(lam) - lam - math.lgamma(n + 1)


def poisson_pmf(lam, n):
    return math.exp(poisson_logpmf(lam, n))


def poisson_cdf(lam, n):
    if n < 0:
        return 0.0
    return math.exp(logsumexp([poisson_logpmf(lam, i) for i in range(n + 1)]))


def chen_stein_check(lam, k, tol=1e-12):
    """lambda P(X <= k-1) <= k P(X <= k) for X ~ Poisson(lambda)."""
    if lam <= 0 or k < 1:
        raise ValueError("need lambda > 0 and k >= 1")
    return lam * poisson_cdf(lam, k - 1) <= k * poisson_cdf(lam, k) + tol


def ks_statistic(sample, cdf):
    """Sup distance between the empirical CDF of `sample` and `cdf`,
    evaluated on both sides of every jump."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("sample must be nonempty")
    F = np.asarray([cdf(t) for t in x], dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - F)
    d_minus = np.max(F - (i - 1) / n)
    return float(max(d_plus, d_minus))


def dkw_bound(n, alpha):
    """Dvoretzky-Kiefer-Wolfowitz band sqrt(log(2/alpha) / (2n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha >= 2:
        return 0.0
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def tv_empirical_poisson(counts, lam):
    """Total variation between an empirical integer law (counts[n] =
    frequency of value n) and Poisson(lambda), including the tail mass
    beyond the observed support."""
    freq = np.asarray(counts, dtype=float)
    total = freq.sum()
    if total < 1:
        raise ValueError("histogram must have total mass >= 1")
    pmf = np.array([poisson_pmf(lam, n) for n in range(freq.size)])
    tail = max(0.0, 1.0 - pmf.sum())
    return float(0.5 * (np.abs(freq / total - pmf).sum() + tail))


def empirical_tail_counts(summaries, u):
    """Per replication, the number of exceedance records above u."""
    return np.array([sum(1 for rec in s.records if rec.height > u)
                     for s in summaries])


def build_intensity_curve(summaries, config, u_grid, confidence=0.999):
    u_grid = np.asarray(u_grid, dtype=float)
    if np.any(u_grid < config.c) or np.any(u_grid >= config.u_cap):
        raise ValueError("u grid must lie inside [c, u_cap)")
    spec = config.threshold_spec
    z = norm.ppf(0.5 + confidence / 2.0)
    nrep = len(summaries)
    exact = np.array([exact_exceedance_mean(config.d, config.k, config.R, spec, u)
                      for u in u_grid])
    emp = np.empty_like(exact)
    half = np.empty_like(exact)
    for i, u in enumerate(u_grid):
        cnt = empirical_tail_counts(summaries, u)
        emp[i] = cnt.mean()
        half[i] = z * cnt.std(ddof=1) / math.sqrt(nrep) if nrep > 1 else math.inf
    return IntensityCurve(grid=u_grid, exact=exact, empirical_mean=emp,
                          empirical_ci_halfwidth=half, confidence=confidence)
