"""Exact k-th nearest neighbour queries under the hyperbolic metric.

MetricIndex is an immutable tree over geodesic polar coordinates whose
nodes carry a radial interval and a direction cone; queries must agree
exactly with the brute-force scan, which serves as the oracle in all
tests. A query whose k-th neighbour lies beyond the cap is reported as
CENSORED.
"""

import math

import numpy as np

from . import geometry
from .backend import kernels


class _Censored:
    """Sentinel: fewer than k neighbours within the cap (the true k-th
    distance exceeds it)."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CENSORED"


CENSORED = _Censored()

DEFAULT_LEAF_SIZE = 48


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return pts.reshape(0, 2)
    if pts.ndim == 1:
        pts = pts[None, :]
    return np.ascontiguousarray(pts)


def _find_id(pts, q):
    # exact coordinate match; -1 when q is not a member of the index
    if pts.shape[0] == 0:
        return -1
    hits = np.nonzero(np.all(pts == np.asarray(q, dtype=float), axis=1))[0]
    return int(hits[0]) if hits.size else -1


class MetricIndex:
    """Read-only polar cone tree over hyperboloid points, keyed by the
    hyperbolic distance (cosh surrogate internally)."""

    def __init__(self, points, leaf_size=DEFAULT_LEAF_SIZE):
        self.points = _as_points(points)
        self._tree = kernels().tree_build(self.points, leaf_size)

    @classmethod
    def build(cls, points, leaf_size=DEFAULT_LEAF_SIZE):
        return cls(points, leaf_size=leaf_size)

    def __len__(self):
        return self.points.shape[0]

    def neighbours_within(self, q, rho, exclude_self=False):
        """All (point, distance) pairs at hyperbolic distance <= rho from q;
        with exclude_self, q itself (by exact coordinates) is omitted."""
        if rho < 0:
            raise ValueError("rho must be nonnegative")
        q = np.asarray(q, dtype=float)
        exclude = _find_id(self.points, q) if exclude_self else -1
        ids = kernels().range_ids(self.points, *self._tree,
                                  q, math.cosh(min(rho, geometry.MAX_RADIUS)),
                                  exclude)
        if ids.size == 0:
            return []
        dists = geometry.distances_from(self.points[ids], q)
        return [(self.points[i], float(t)) for i, t in zip(ids, dists)]

    def neighbour_ids_within(self, q, rho, exclude_id=-1):
        """Index-level variant returning point ids (used by the exceedance
        pipeline and the oracle tests)."""
        q = np.asarray(q, dtype=float)
        return kernels().range_ids(self.points, *self._tree,
                                   q, math.cosh(min(rho, geometry.MAX_RADIUS)),
                                   exclude_id)

    def kth_neighbour_distance(self, q, k, r_cap):
        """The k-th smallest distance from q to index points other than q,
        or CENSORED when fewer than k lie within r_cap."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if r_cap <= 0:
            raise ValueError("r_cap must be positive")
        q = np.asarray(q, dtype=float)
        self_id = _find_id(self.points, q)
        m = kernels().kth_cosh_point(self.points, *self._tree,
                                     q, self_id, k,
                                     math.cosh(min(r_cap, geometry.MAX_RADIUS)))
        if not np.isfinite(m):
            return CENSORED
        return math.acosh(max(m, 1.0))

    def has_k_within_for_ids(self, q_ids, k, cosh_cap):
        """Batch flag per member point: at least k other points within the
        cap. Early exit makes this much cheaper than the k-th distance, so
        it serves as the first pass of the exceedance pipeline."""
        q_ids = np.ascontiguousarray(q_ids, dtype=np.int64)
        return kernels().has_k_within(self.points, *self._tree,
                                      q_ids, k, cosh_cap)

    def kth_cosh_for_ids(self, q_ids, k, cosh_cap):
        """Batch cosh of k-th neighbour distances for member points
        (self excluded); inf marks censoring. Hot path."""
        q_ids = np.ascontiguousarray(q_ids, dtype=np.int64)
        return kernels().kth_cosh_batch(self.points, *self._tree,
                                        q_ids, k, cosh_cap)


def brute_force_kth(points, q, k):
    """Reference k-th neighbour distance by full scan (oracle)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = _as_points(points)
    q = np.asarray(q, dtype=float)
    m = kernels().brute_kth_cosh(pts, q, _find_id(pts, q), k)
    if not np.isfinite(m):
        return CENSORED
    return math.acosh(max(m, 1.0))


def brute_force_within(points, q, rho, exclude_self=False):
    """Reference fixed-radius neighbour ids by full scan (oracle)."""
    pts = _as_points(points)
    q = np.asarray(q, dtype=float)
    exclude = _find_id(pts, q) if exclude_self else -1
    return kernels().brute_range_ids(pts, q, math.cosh(rho), exclude)
