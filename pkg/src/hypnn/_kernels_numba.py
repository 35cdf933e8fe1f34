"""Numba implementations of the hot kernels.

All metric work is done in the cosh surrogate: for hyperboloid points a, b
the value m = -<a, b>_Minkowski equals cosh(distance) and is monotone in
the distance, so acosh never appears inside the search loops.

The spatial index is a binary tree over geodesic polar coordinates. Every
node stores a radial interval [rlo, rhi] and a direction cone (axis mu,
half-angle psi) enclosing its points. The lower bound on cosh(distance)
from a query at radius a, direction w to the node region is

    cosh(a - r) + 2 sinh(a) sinh(r) sin^2(gamma / 2)

minimised over r in the interval, where gamma is the angular gap between
w and the cone. Both terms are nonnegative, so the bound keeps full
relative precision even when the raw Minkowski dot would cancel twelve
orders of magnitude; angles are recovered from chord lengths for the same
reason. A small absolute margin (scaled to the roundoff of the leaf dot
products) keeps the pruning conservative.
"""

import numpy as np
from numba import njit

JIT = dict(cache=True, nogil=True)

_EPS = 2.220446049250313e-16

# columns of the per-node bound table
_RLO, _RHI, _CRLO, _SRLO, _CRHI, _SRHI, _QTLO, _QTHI, _PSI = range(9)


@njit(**JIT)
def _vol(a, c, r):
    # closed-form ball volume from the exponential expansion of sinh^{d-1}
    s = 0.0
    for j in range(a.shape[0]):
        if a[j] != 0.0:
            s += c[j] * (np.expm1(a[j] * r) / a[j])
        else:
            s += c[j] * r
    return s


@njit(**JIT)
def invert_volume(d, w, a, c, V, rtol):
    """Vectorized inverse of the ball volume by safeguarded Newton.

    d: dimension, w: unit sphere area, (a, c): volume expansion, V: array of
    target volumes. Bracket from the exponential growth envelopes.
    """
    n = V.shape[0]
    out = np.empty(n)
    if d == 2:
        # V = w (cosh r - 1) inverts in closed form
        for i in range(n):
            v = V[i]
            out[i] = np.arccosh(1.0 + v / w) if v > 0.0 else 0.0
        return out
    gamma = w / (2.0 * (d - 1) * 3.0 ** (d - 1))
    Gamma = w / ((d - 1) * 2.0 ** (d - 1))
    for i in range(n):
        v = V[i]
        if v <= 0.0:
            out[i] = 0.0
            continue
        lo = 0.0
        hi = max(2.0, np.log(max(v, gamma) / gamma) / (d - 1))
        small = (d * v / w) ** (1.0 / d)
        if small < 1.0:
            r = small
        else:
            r = max(1.0, np.log(v / Gamma) / (d - 1))
        if r < lo:
            r = lo
        elif r > hi:
            r = hi
        lv = np.log(v)
        for _ in range(200):
            fv = _vol(a, c, r)
            if fv > v:
                hi = r
            else:
                lo = r
            df = w * np.sinh(r) ** (d - 1)
            ok = df > 0.0 and fv > 0.0
            rn = r
            if ok:
                # Newton on log(volume): nearly linear in r, so the step
                # stays accurate far from the root as well
                rn = r - (np.log(fv) - lv) * fv / df
                ok = lo < rn < hi
            if not ok:
                rn = 0.5 * (lo + hi)
            if abs(rn - r) <= rtol * max(rn, 1e-300):
                r = rn
                break
            r = rn
        out[i] = r
    return out


@njit(**JIT)
def _cosh_dist(pts, i, q):
    # m = -<p_i, q> = cosh(distance); clamped at 1 against rounding
    m = -pts[i, 0] * q[0]
    for j in range(1, pts.shape[1]):
        m += pts[i, j] * q[j]
    m = -m
    if m < 1.0:
        m = 1.0
    return m


@njit(**JIT)
def _insert_best(best, k, m):
    # keep the k smallest cosh distances, ascending
    if m >= best[k - 1]:
        return
    j = k - 1
    while j > 0 and best[j - 1] > m:
        best[j] = best[j - 1]
        j -= 1
    best[j] = m


@njit(**JIT)
def tree_build(pts, leaf_size):
    """Build the polar cone tree over pts (n, d+1) hyperboloid coordinates.

    Returns (idx, left, right, slo, shi, nd, mu, n_nodes). Leaves have
    left == -1 and cover idx[slo:shi]; nd holds the per-node radial and
    angular bound data, mu the cone axes. Splits take the median of the
    coordinate with the largest metric extent, so leaves are metrically
    balanced patches.
    """
    n, dim1 = pts.shape
    d = dim1 - 1
    idx = np.arange(n)
    if leaf_size < 2:
        leaf_size = 2
    cap = 16 + 4 * (n // leaf_size + 1)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    slo = np.zeros(cap, np.int64)
    shi = np.zeros(cap, np.int64)
    nd = np.zeros((cap, 9))
    mu = np.zeros((cap, d))
    if n == 0:
        return idx, left, right, slo, shi, nd, mu, 0

    # working copies in geodesic polar coordinates, permuted alongside idx
    rw = np.empty(n)
    uw = np.empty((n, d))
    for i in range(n):
        cr = pts[i, 0]
        if cr < 1.0:
            cr = 1.0
        sr = np.sqrt((cr - 1.0) * (cr + 1.0))
        rw[i] = np.arccosh(cr)
        if sr > 0.0:
            for j in range(d):
                uw[i, j] = pts[i, j + 1] / sr
        else:
            for j in range(d):
                uw[i, j] = 0.0

    u0 = np.empty(d)
    u1 = np.empty(d)
    us = np.empty(d)
    stack = np.empty((256, 3), np.int64)
    n_nodes = 1
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    while top >= 0:
        lo = stack[top, 0]
        hi = stack[top, 1]
        slot = stack[top, 2]
        top -= 1
        slo[slot] = lo
        shi[slot] = hi
        # radial interval, direction box and cone axis in one fused scan
        r0 = np.inf
        r1 = -np.inf
        for j in range(d):
            u0[j] = np.inf
            u1[j] = -np.inf
            us[j] = 0.0
        for t in range(lo, hi):
            v = rw[t]
            if v < r0:
                r0 = v
            if v > r1:
                r1 = v
            for j in range(d):
                v = uw[t, j]
                us[j] += v
                if v < u0[j]:
                    u0[j] = v
                if v > u1[j]:
                    u1[j] = v
        musq = 0.0
        for j in range(d):
            musq += us[j] * us[j]
        if musq > 0.0:
            inv = 1.0 / np.sqrt(musq)
            for j in range(d):
                mu[slot, j] = us[j] * inv
        else:
            mu[slot, 0] = 1.0
            for j in range(1, d):
                mu[slot, j] = 0.0
        # chord bound from the box corners: separable over coordinates
        sps = 0.0
        for j in range(d):
            e0 = u0[j] - mu[slot, j]
            e1 = u1[j] - mu[slot, j]
            sps += max(e0 * e0, e1 * e1)
        sps *= 0.25
        if sps > 1.0:
            sps = 1.0
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
        ax = 0
        ext = r1 - r0
        ascale = np.sinh(r1)
        if ascale < 1.0:
            ascale = 1.0
        for j in range(d):
            e = (u1[j] - u0[j]) * ascale
            if e > ext:
                ext = e
                ax = j + 1
        mid = (lo + hi) // 2
        l = lo
        h = hi - 1
        while l < h:
            if ax == 0:
                pv = rw[(l + h) >> 1]
            else:
                pv = uw[(l + h) >> 1, ax - 1]
            i = l
            j = h
            while i <= j:
                if ax == 0:
                    while rw[i] < pv:
                        i += 1
                    while rw[j] > pv:
                        j -= 1
                else:
                    while uw[i, ax - 1] < pv:
                        i += 1
                    while uw[j, ax - 1] > pv:
                        j -= 1
                if i <= j:
                    idx[i], idx[j] = idx[j], idx[i]
                    rw[i], rw[j] = rw[j], rw[i]
                    for jj in range(d):
                        uw[i, jj], uw[j, jj] = uw[j, jj], uw[i, jj]
                    i += 1
                    j -= 1
            if mid <= j:
                h = j
            elif mid >= i:
                l = i
            else:
                break
        lslot = n_nodes
        rslot = n_nodes + 1
        n_nodes += 2
        left[slot] = lslot
        right[slot] = rslot
        top += 1
        stack[top, 0] = lo
        stack[top, 1] = mid
        stack[top, 2] = lslot
        top += 1
        stack[top, 0] = mid
        stack[top, 1] = hi
        stack[top, 2] = rslot
    return idx, left, right, slo, shi, nd, mu, n_nodes


@njit(**JIT)
def _query_setup(q, w):
    # radius, direction and derived quantities of the query point
    ca = q[0]
    if ca < 1.0:
        ca = 1.0
    sa = np.sqrt((ca - 1.0) * (ca + 1.0))
    a = np.arccosh(ca)
    if sa > 0.0:
        for j in range(w.shape[0]):
            w[j] = q[j + 1] / sa
    else:
        for j in range(w.shape[0]):
            w[j] = 0.0
    qta = 1.0 / (ca * (ca + sa))  # 1 - tanh(a), cancellation-free
    margin = 16.0 * _EPS * ca
    return a, ca, sa, sa / ca, qta, margin


@njit(**JIT)
def _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin):
    # lower bound on cosh(distance) from the query to any point of node c
    c2 = 0.0
    for j in range(w.shape[0]):
        dv = w[j] - mu[c, j]
        c2 += dv * dv
    c2 *= 0.25
    if c2 > 1.0:
        c2 = 1.0
    gam = 2.0 * np.arcsin(np.sqrt(c2)) - nd[c, _PSI]
    if gam <= 0.0:
        s2 = 0.0
    else:
        sg = np.sin(0.5 * gam)
        s2 = sg * sg
    one_mt = qta + 2.0 * ta * s2  # 1 - tanh(a) cos(gamma)
    if one_mt >= nd[c, _QTLO]:
        b = np.cosh(a - nd[c, _RLO]) + 2.0 * sa * nd[c, _SRLO] * s2
    elif one_mt <= nd[c, _QTHI]:
        b = np.cosh(a - nd[c, _RHI]) + 2.0 * sa * nd[c, _SRHI] * s2
    else:
        b = ca * np.sqrt(one_mt * (2.0 - one_mt))
    b -= margin * nd[c, _CRHI]
    if b < 1.0:
        b = 1.0
    return b


@njit(**JIT)
def _kth_query(pts, idx, left, right, slo, shi, nd, mu,
               q, self_id, k, cosh_cap, best, w, nstack, bstack):
    for j in range(k):
        best[j] = np.inf
    a, ca, sa, ta, qta, margin = _query_setup(q, w)
    tau = cosh_cap
    nb = 0
    nstack[0] = 0
    bstack[0] = 1.0
    top = 0
    while top >= 0:
        node = nstack[top]
        bnd = bstack[top]
        top -= 1
        if bnd > tau:
            continue
        if left[node] < 0:
            for t in range(slo[node], shi[node]):
                i = idx[t]
                if i == self_id:
                    continue
                m = _cosh_dist(pts, i, q)
                if m <= tau:
                    _insert_best(best, k, m)
                    if nb < k:
                        nb += 1
                    if nb == k:
                        tau = best[k - 1]
            continue
        for side in range(2):
            c = left[node] if side == 0 else right[node]
            b = _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin)
            if b <= tau:
                top += 1
                nstack[top] = c
                bstack[top] = b
        # pop the nearer child first
        if top >= 1 and bstack[top - 1] < bstack[top]:
            nstack[top - 1], nstack[top] = nstack[top], nstack[top - 1]
            bstack[top - 1], bstack[top] = bstack[top], bstack[top - 1]
    return best[k - 1]


@njit(**JIT)
def kth_cosh_batch(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                   q_ids, k, cosh_cap):
    """cosh of the k-th neighbour distance (self excluded, capped) for each
    query id; inf marks fewer than k neighbours within the cap."""
    nq = q_ids.shape[0]
    out = np.empty(nq)
    if n_nodes == 0:
        for i in range(nq):
            out[i] = np.inf
        return out
    d = pts.shape[1] - 1
    best = np.empty(k)
    w = np.empty(d)
    nstack = np.empty(256, np.int64)
    bstack = np.empty(256)
    for i in range(nq):
        qi = q_ids[i]
        out[i] = _kth_query(pts, idx, left, right, slo, shi, nd, mu,
                            pts[qi], qi, k, cosh_cap, best, w,
                            nstack, bstack)
    return out


@njit(**JIT)
def kth_cosh_point(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                   q, self_id, k, cosh_cap):
    if n_nodes == 0:
        return np.inf
    d = pts.shape[1] - 1
    best = np.empty(k)
    w = np.empty(d)
    nstack = np.empty(256, np.int64)
    bstack = np.empty(256)
    return _kth_query(pts, idx, left, right, slo, shi, nd, mu,
                      q, self_id, k, cosh_cap, best, w, nstack, bstack)


@njit(**JIT)
def has_k_within(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
                 q_ids, k, cosh_cap):
    """For each query id: does the index hold at least k other points with
    cosh(distance) <= cosh_cap? Early exit at the k-th hit, so this is far
    cheaper than the k-th distance itself."""
    nq = q_ids.shape[0]
    out = np.zeros(nq, np.bool_)
    if n_nodes == 0:
        return out
    n = pts.shape[0]
    d = pts.shape[1] - 1
    w = np.empty(d)
    nstack = np.empty(256, np.int64)
    bstack = np.empty(256)
    # visit queries in tree position order and try the query's own leaf
    # first: most points find their k-th hit among leaf mates, skipping
    # the root descent entirely
    inv = np.empty(n, np.int64)
    for t in range(n):
        inv[idx[t]] = t
    pos = np.empty(nq, np.int64)
    for i in range(nq):
        pos[i] = inv[q_ids[i]]
    order = np.argsort(pos)
    for oi in range(nq):
        i = order[oi]
        qi = q_ids[i]
        q = pts[qi]
        node = 0
        while left[node] >= 0:
            c = left[node]
            node = c if pos[i] < shi[c] else right[node]
        cnt = 0
        for t in range(slo[node], shi[node]):
            ii = idx[t]
            if ii == qi:
                continue
            if _cosh_dist(pts, ii, q) <= cosh_cap:
                cnt += 1
                if cnt >= k:
                    break
        if cnt >= k:
            out[i] = True
            continue
        a, ca, sa, ta, qta, margin = _query_setup(q, w)
        cnt = 0
        nstack[0] = 0
        bstack[0] = 1.0
        top = 0
        while top >= 0 and cnt < k:
            node = nstack[top]
            top -= 1
            if left[node] < 0:
                for t in range(slo[node], shi[node]):
                    ii = idx[t]
                    if ii == qi:
                        continue
                    if _cosh_dist(pts, ii, q) <= cosh_cap:
                        cnt += 1
                        if cnt >= k:
                            break
                continue
            for side in range(2):
                c = left[node] if side == 0 else right[node]
                b = _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin)
                if b <= cosh_cap:
                    top += 1
                    nstack[top] = c
                    bstack[top] = b
            if top >= 1 and bstack[top - 1] < bstack[top]:
                nstack[top - 1], nstack[top] = nstack[top], nstack[top - 1]
                bstack[top - 1], bstack[top] = bstack[top], bstack[top - 1]
        out[i] = cnt >= k
    return out


@njit(**JIT)
def range_ids(pts, idx, left, right, slo, shi, nd, mu, n_nodes,
              q, cosh_rho, exclude_id):
    """Ids of all points with cosh(distance to q) <= cosh_rho, ascending."""
    n = pts.shape[0]
    out = np.empty(n, np.int64)
    cnt = 0
    if n_nodes == 0:
        return out[:0]
    d = pts.shape[1] - 1
    w = np.empty(d)
    a, ca, sa, ta, qta, margin = _query_setup(q, w)
    nstack = np.empty(256, np.int64)
    top = 0
    nstack[0] = 0
    while top >= 0:
        node = nstack[top]
        top -= 1
        if left[node] < 0:
            for t in range(slo[node], shi[node]):
                i = idx[t]
                if i == exclude_id:
                    continue
                if _cosh_dist(pts, i, q) <= cosh_rho:
                    out[cnt] = i
                    cnt += 1
            continue
        for side in range(2):
            c = left[node] if side == 0 else right[node]
            b = _node_bound(nd, mu, c, w, a, ca, sa, ta, qta, margin)
            if b <= cosh_rho:
                top += 1
                nstack[top] = c
    return np.sort(out[:cnt])


@njit(**JIT)
def brute_kth_cosh(pts, q, self_id, k):
    """Full-scan oracle: cosh of the k-th neighbour distance, inf if fewer
    than k neighbours exist."""
    best = np.full(k, np.inf)
    for i in range(pts.shape[0]):
        if i == self_id:
            continue
        m = _cosh_dist(pts, i, q)
        _insert_best(best, k, m)
    return best[k - 1]


@njit(**JIT)
def brute_range_ids(pts, q, cosh_rho, exclude_id):
    out = np.empty(pts.shape[0], np.int64)
    cnt = 0
    for i in range(pts.shape[0]):
        if i == exclude_id:
            continue
        if _cosh_dist(pts, i, q) <= cosh_rho:
            out[cnt] = i
            cnt += 1
    return out[:cnt].copy()
