"""Benchmark the numba kernels against the pure-numpy fallback.

Times the hot paths on a realistic workload: tree construction, batch k-th
neighbour queries, the counting pass, range queries and the radius
inversion used by the sampler. Run with

    python benchmarks/benchmark_backends.py [--d 2] [--rmax 8.0]

Both backends are imported directly so the comparison is independent of
HYPNN_BACKEND.
"""

import argparse
import math
import time

import numpy as np

from hypnn import geometry
from hypnn.sampling import SeedSpec, sample_ball_process


def _load_backends():
    from hypnn import _kernels_numpy
    backends = [("numpy", _kernels_numpy)]
    try:
        from hypnn import _kernels_numba
        backends.insert(0, ("numba", _kernels_numba))
    except ImportError:
        print("numba not importable; benchmarking the fallback only")
    return backends


def _time(fn, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--rmax", type=float, default=8.0)
    ap.add_argument("--queries", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    batch = sample_ball_process(args.d, args.rmax, SeedSpec(args.seed, 0))
    pts = batch.points
    n = pts.shape[0]
    rng = np.random.default_rng(1)
    q_ids = np.sort(rng.choice(n, size=min(args.queries, n), replace=False))
    q_ids = np.ascontiguousarray(q_ids, dtype=np.int64)
    cap = math.cosh(geometry.inverse_ball_volume(args.d, 25.0))
    a_expand, c_expand = geometry.volume_expansion(args.d)
    w = geometry.unit_sphere_area(args.d)
    V = rng.random(200000) * geometry.ball_volume(args.d, args.rmax)

    print(f"d={args.d} rmax={args.rmax} n={n} queries={q_ids.size}")
    print(f"{'kernel':<18}" + "".join(f"{name:>14}"
                                      for name, _ in _load_backends()))

    rows = {}
    for name, mod in _load_backends():
        tree = mod.tree_build(pts, 48)  # warm any jit compilation
        t_build, tree = _time(lambda: mod.tree_build(pts, 48))
        t_kth, kth = _time(
            lambda: mod.kth_cosh_batch(pts, *tree, q_ids, 1, cap))
        t_cnt, flags = _time(
            lambda: mod.has_k_within(pts, *tree, q_ids, 1, cap))
        t_rng, ids = _time(
            lambda: mod.range_ids(pts, *tree, pts[int(q_ids[0])],
                                  math.cosh(2.0), int(q_ids[0])))
        t_inv, _ = _time(
            lambda: mod.invert_volume(args.d, w, a_expand, c_expand, V, 1e-12))
        rows[name] = dict(tree_build=t_build, kth_batch=t_kth,
                          count_pass=t_cnt, range_query=t_rng,
                          invert_volume=t_inv)
        rows.setdefault("_check", {}).setdefault("kth", kth)
        assert np.array_equal(rows["_check"]["kth"], kth), \
            "backends disagree on k-th distances"

    names = [name for name, _ in _load_backends()]
    for kernel in ("tree_build", "kth_batch", "count_pass", "range_query",
                   "invert_volume"):
        line = f"{kernel:<18}"
        for name in names:
            line += f"{rows[name][kernel] * 1e3:>12.2f}ms"
        if len(names) == 2:
            ratio = rows[names[1]][kernel] / max(rows[names[0]][kernel], 1e-12)
            line += f"   x{ratio:.1f}"
        print(line)


if __name__ == "__main__":
    main()
