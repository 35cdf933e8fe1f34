"""Pure-numpy fallback for the hot kernels.

Same tree, same bound arithmetic and the same cosh-surrogate leaf scans as
the numba backend, with vectorized segment operations instead of jitted
scalar loops. Traversal runs in Python, so this path is much slower on
large inputs; it exists for numba-free environments and as the benchmark
baseline.
"""

import numpy as np

_EPS = 2.220446049250313e-16

# columns of the per-node bound table
_RLO, _RHI, _CRLO, _SRLO, _CRHI, _SRHI, _QTLO, _QTHI, _PSI = range(9)


def _cosh_dists(pts, rows, q):
    # elementwise column arithmetic keeps per-row results independent of
    # the row subset, so tree and brute-force scans agree bit-for-bit
    sub = pts[rows]
    m = sub[:, 0] * (-q[0])
    for j in range(1, pts.shape[1]):
        m += sub[:, j] * q[j]
    return np.maximum(-m, 1.0)


def invert_volume(d, w, a, c, V, rtol):
    """Vectorized safeguarded Newton for the inverse ball volume."""
    V = np.asarray(V, dtype=float)
    out = np.zeros_like(V)
    act = V > 0.0
    if not np.any(act):
        return out
    v = V[act]
    if d == 2:
        # V = w (cosh r - 1) inverts in closed form
        out[act] = np.arccosh(1.0 + v / w)
        return out
    gamma = w / (2.0 * (d - 1) * 3.0 ** (d - 1))
    Gamma = w / ((d - 1) * 2.0 ** (d - 1))
    lo = np.zeros_like(v)
    hi = np.maximum(2.0, np.log(np.maximum(v, gamma) / gamma) / (d - 1))
    small = (d * v / w) ** (1.0 / d)
    r = np.where(small < 1.0, small,
                 np.maximum(1.0, np.log(v / Gamma) / (d - 1)))
    r = np.clip(r, lo, hi)

    def vol(x):
        s = np.zeros_like(x)
        for j in range(a.shape[0]):
            if a[j] != 0.0:
                s += c[j] * (np.expm1(a[j] * x) / a[j])
            else:
                s += c[j] * x
        return s

    lv = np.log(v)
    for _ in range(200):
        fv = vol(r)
        hi = np.where(fv > v, r, hi)
        lo = np.where(fv > v, lo, r)
        df = w * np.sinh(r) ** (d - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            # Newton on log(volume): nearly linear in r
            rn = r - (np.log(fv) - lv) * fv / np.where(
                (df > 0.0) & (fv > 0.0), df, np.nan)
        bad = ~np.isfinite(rn) | (rn <= lo) | (rn >= hi)
        rn = np.where(bad, 0.5 * (lo + hi), rn)
        done = np.abs(rn - r) <= rtol * np.maximum(rn, 1e-300)
        r = rn
        if np.all(done):
            break
    out[act] = r
    return out


def tree_build(pts, leaf_size):
    """Polar cone tree with the same array layout as the numba backend."""
    n = pts.shape[0]
    d = pts.shape[1] - 1
    idx = np.arange(n)
    leaf_size = max(leaf_size, 2)
    cap = 16 + 4 * (n // leaf_size + 1)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    slo = np.zeros(cap, np.int64)
    shi = np.zeros(cap, np.int64)
    nd = np.zeros((cap, 9))
    mu = np.zeros((cap, d))
    if n == 0:
        return idx, left, right, slo, shi, nd, mu, 0

    cr = np.maximum(pts[:, 0], 1.0)
    sr = np.sqrt((cr - 1.0) * (cr + 1.0))
    rw = np.arccosh(cr)
    with np.errstate(divide="ignore", invalid="ignore"):
        uw = np.where(sr[:, None] > 0.0, pts[:, 1:] / sr[:, None], 0.0)

    n_nodes = 1
    stack = [(0, n, 0)]
    while stack:
        lo, hi, slot = stack.pop()
        slo[slot] = lo
        shi[slot] = hi
        rseg = rw[lo:hi]
        useg = uw[lo:hi]
        r0 = rseg.min()
        r1 = rseg.max()
        u0 = useg.min(axis=0)
        u1 = useg.max(axis=0)
        us = useg.sum(axis=0)
        musq = float(us @ us)
        if musq > 0.0:
            ax_mu = us / np.sqrt(musq)
        else:
            ax_mu = np.zeros(d)
            ax_mu[0] = 1.0
        mu[slot] = ax_mu
        # chord bound from the box corners: separable over coordinates
        sps = 0.25 * float(np.maximum((u0 - ax_mu) ** 2,
                                      (u1 - ax_mu) ** 2).sum())
        sps = min(sps, 1.0)
        nd[slot, _RLO] = r0
        nd[slot, _RHI] = r1
        nd[slot, _CRLO] = np.cosh(r0)
        nd[slot, _SRLO] = np.sinh(r0)
        nd[slot, _CRHI] = np.cosh(r1)
        nd[slot, _SRHI] = np.sinh(r1)
        nd[slot, _QTLO] = 2.0 / (np.exp(2.0 * r0) + 1.0)
        nd[slot, _QTHI] = 2.0 / (np.exp(2.0 * r1) + 1.0)
        nd[slot, _PSI] = 2.0 * np.arcsin(np.sqrt(sps))
        if hi - lo <= leaf_size:
            continue
        # split axis: largest extent, angular widths scaled to metric units
        ascale = max(np.sinh(r1), 1.0)
        ext = np.concatenate(([r1 - r0], (u1 - u0) * ascale))
        ax = int(np.argmax(ext))
        key = rseg if ax == 0 else useg[:, ax - 1]
        h = (hi - lo) // 2
        order = np.argpartition(key, h)
        idx[lo:hi] = idx[lo:hi][order]
        rw[lo:hi] = rseg[order]
        uw[lo:hi] = useg[order]
        mid = lo + h
        lslot, rslot = n_nodes, n_nodes + 1
        n_nodes += 2
        left[slot] = lslot
        right[slot] = rslot
        stack.append((lo, mid, lslot))
        stack.append((mid, hi, rslot))
    return idx, left, right, slo, shi, nd, mu, n_nodes


def _query_setup(q):
    ca = max(float(q[0]), 1.0)
    sa = np.sqrt((ca - 1.0) * (ca + 1.0))
    a = np.arccosh(ca)
    qta = 1.0 / (ca * (ca + sa))  # 1 - tanh(a), cancellation-free
    margin = 16.0 * _EPS * ca
    return a, ca, sa, sa / ca, qta, margin


def _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin):
    # lower bound on cosh(distance) from the query to any point of node c
    dv = w - mu[c]
    c2 = min(0.25 * float(dv @ dv), 1.0)
    gam = 2.0 * np.arcsin(np.sqrt(c2)) - nd[c, _PSI]
    s2 = np.sin(0.5 * gam) ** 2 if gam > 0.0 else 0.0
    one_mt = qta + 2.0 * ta * s2  # 1 - tanh(a) cos(gamma)
    if one_mt >= nd[c, _QTLO]:
        b = np.cosh(a - nd[c, _RLO]) + 2.0 * sa * nd[c, _SRLO] * s2
    elif one_mt <= nd[c, _QTHI]:
        b = np.cosh(a - nd[c, _RHI]) + 2.0 * sa * nd[c, _SRHI] * s2
    else:
        b = ca * np.sqrt(one_mt * (2.0 - one_mt))
    return max(b - margin * nd[c, _CRHI], 1.0)


def _kth_query(pts, idx, left, right, slo, shi, nd, mu,
               q, self_id, k, cosh_cap):
    best = np.full(k, np.inf)
    a, ca, sa, ta, qta, margin = _query_setup(q)
    w = q[1:] / sa if sa > 0.0 else np.zeros(q.shape[0] - 1)
    stack = [(0, 1.0)]
    while stack:
        node, bnd = stack.pop()
        tau = min(best[k - 1], cosh_cap)
        if bnd > tau:
            continue
        if left[node] < 0:
            seg = idx[slo[node]:shi[node]]
            seg = seg[seg != self_id]
            ms = _cosh_dists(pts, seg, q)
            ms = ms[ms <= tau]
            if ms.size:
                merged = np.concatenate((best, ms))
                merged.partition(k - 1)
                best = np.sort(merged[:k])
            continue
        pair = []
        for c in (left[node], right[node]):
            b = _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin)
            if b <= tau:
                pair.append((b, c))
        # push the farther child first so the nearer one is popped first
        pair.sort(reverse=True)
        stack.extend((c, b) for b, c in pair)
    return best[k - 1]


def kth_cosh_batch(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                   q_ids, k, cosh_cap):
    nq = q_ids.shape[0]
    out = np.empty(nq)
    if n_nodes == 0:
        out.fill(np.inf)
        return out
    for i in range(nq):
        qi = q_ids[i]
        out[i] = _kth_query(pts, idx, left, right, slo, shi, nd, mu,
                            pts[qi], qi, k, cosh_cap)
    return out


def kth_cosh_point(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                   q, self_id, k, cosh_cap):
    if n_nodes == 0:
        return np.inf
    return _kth_query(pts, idx, left, right, slo, shi, nd, mu,
                      q, self_id, k, cosh_cap)


def has_k_within(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                 q_ids, k, cosh_cap):
    """Early-exit membership counts: at least k other points within the cap."""
    nq = q_ids.shape[0]
    out = np.zeros(nq, np.bool_)
    if n_nodes == 0:
        return out
    for i in range(nq):
        qi = q_ids[i]
        q = pts[qi]
        a, ca, sa, ta, qta, margin = _query_setup(q)
        w = q[1:] / sa if sa > 0.0 else np.zeros(q.shape[0] - 1)
        cnt = 0
        stack = [0]
        while stack and cnt < k:
            node = stack.pop()
            if left[node] < 0:
                seg = idx[slo[node]:shi[node]]
                seg = seg[seg != qi]
                ms = _cosh_dists(pts, seg, q)
                cnt += int(np.count_nonzero(ms <= cosh_cap))
                continue
            pair = []
            for c in (left[node], right[node]):
                b = _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin)
                if b <= cosh_cap:
                    pair.append((b, c))
            pair.sort(reverse=True)
            stack.extend(c for _, c in pair)
        out[i] = cnt >= k
    return out


def range_ids(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
              q, cosh_rho, exclude_id):
    if n_nodes == 0:
        return np.empty(0, np.int64)
    a, ca, sa, ta, qta, margin = _query_setup(q)
    w = q[1:] / sa if sa > 0.0 else np.zeros(q.shape[0] - 1)
    hits = []
    stack = [0]
    while stack:
        node = stack.pop()
        if left[node] < 0:
            seg = idx[slo[node]:shi[node]]
            seg = seg[seg != exclude_id]
            ms = _cosh_dists(pts, seg, q)
            hits.append(seg[ms <= cosh_rho])
            continue
        for c in (left[node], right[node]):
            if _node_bound(nd, mu, c, w, a, ca, sa, ta, qta,
                           margin) <= cosh_rho:
                stack.append(c)
    if hits:
        return np.sort(np.concatenate(hits))
    return np.empty(0, np.int64)


def brute_kth_cosh(pts, q, self_id, k):
    rows = np.arange(pts.shape[0])
    rows = rows[rows != self_id]
    ms = _cosh_dists(pts, rows, q)
    if ms.size < k:
        return np.inf
    ms.partition(k - 1)
    return ms[k - 1]


def brute_range_ids(pts, q, cosh_rho, exclude_id):
    rows = np.arange(pts.shape[0])
    rows = rows[rows != exclude_id]
    ms = _cosh_dists(pts, rows, q)
    return rows[ms <= cosh_rho]
