"""Pure-Python/numpy versions of the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import heapq

import numpy as np

_CHUNK = 4096


def dijkstra(indptr, indices, weights, source, target):
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    # plain lists are much faster than numpy scalars inside the loop
    ip = indptr.tolist()
    ix = indices.tolist()
    wt = weights.tolist()
    dl = dist.tolist()
    pl = pred.tolist()
    dn = done.tolist()
    dl[source] = 0.0
    heap = [(0.0, int(source))]
    while heap:
        d, u = heapq.heappop(heap)
        if dn[u]:
            continue
        dn[u] = True
        if u == target:
            break
        for e in range(ip[u], ip[u + 1]):
            v = ix[e]
            if dn[v]:
                continue
            nd = d + wt[e]
            if nd < dl[v]:
                dl[v] = nd
                pl[v] = u
                heapq.heappush(heap, (nd, v))
    return float(dl[target]), np.asarray(pl, dtype=np.int64)


def segment_distances(points, a, b):
    points = np.asarray(points, dtype=float)
    a = np.asarray(a, dtype=float)
    e = np.asarray(b, dtype=float) - a
    ll = np.einsum("ij,ij->i", e, e)
    safe = np.where(ll > 0.0, ll, 1.0)
    out = np.empty(len(points))
    for start in range(0, len(points), _CHUNK):
        p = points[start:start + _CHUNK]
        rel = p[:, None, :] - a[None, :, :]
        t = (rel[..., 0] * e[None, :, 0] + rel[..., 1] * e[None, :, 1]) / safe[None, :]
        t = np.where(ll[None, :] > 0.0, np.clip(t, 0.0, 1.0), 0.0)
        dx = rel[..., 0] - t * e[None, :, 0]
        dy = rel[..., 1] - t * e[None, :, 1]
        out[start:start + _CHUNK] = np.sqrt(np.min(dx * dx + dy * dy, axis=1))
    return out


def winding_numbers(points, vertices):
    points = np.asarray(points, dtype=float)
    v0 = np.asarray(vertices, dtype=float)
    v1 = np.roll(v0, -1, axis=0)
    out = np.zeros(len(points), dtype=np.int64)
    step = max(1, _CHUNK * 64 // max(len(v0), 1))
    for start in range(0, len(points), step):
        p = points[start:start + step]
        px = p[:, 0:1]
        py = p[:, 1:2]
        cross = (v1[None, :, 0] - v0[None, :, 0]) * (py - v0[None, :, 1]) \
            - (px - v0[None, :, 0]) * (v1[None, :, 1] - v0[None, :, 1])
        up = (v0[None, :, 1] <= py) & (v1[None, :, 1] > py) & (cross > 0.0)
        down = (v0[None, :, 1] > py) & (v1[None, :, 1] <= py) & (cross < 0.0)
        out[start:start + step] = up.sum(axis=1) - down.sum(axis=1)
    return out


# Kernel domain kinds. LINES: params rows (nx, ny, o), d(x) = min_k (n_k . x - o_k)
# (a half-plane or a convex polygon); DISC: params [[cx, cy, R]].
LINES = 1
DISC = 2
GOLDEN = (5.0 ** 0.5 - 1.0) / 2.0
_R2 = 0.5 ** 0.5
DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [_R2, _R2], [_R2, -_R2]])


def _log_ratio(x):
    """log1p(x) / x with the removable singularity at 0 filled in."""
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x / 2.0 + x * x / 3.0, np.log1p(safe) / safe)


def _lines_lengths(p, q, params):
    # 1/d is integrated exactly on each piece of the lower envelope of the
    # affine functions n_k . x - o_k along the segment.
    n, m = len(p), len(params)
    a = p @ params[:, :2].T - params[:, 2]
    b = (q - p) @ params[:, :2].T
    length = np.hypot(q[:, 0] - p[:, 0], q[:, 1] - p[:, 1])
    rows = np.arange(n)
    i = np.argmin(np.where(a == a.min(axis=1, keepdims=True), b, np.inf), axis=1)
    t = np.zeros(n)
    total = np.zeros(n)
    active = np.ones(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(m + 1):
            ai, bi = a[rows, i], b[rows, i]
            tc = (a - ai[:, None]) / (bi[:, None] - b)
            tc = np.where((b < bi[:, None]) & (tc >= t[:, None]), tc, np.inf)
            j = np.argmin(tc, axis=1)
            tn = np.minimum(tc[rows, j], 1.0)
            l0 = ai + bi * t
            piece = length * (tn - t) * _log_ratio(bi * (tn - t) / l0) / l0
            total += np.where(active, piece, 0.0)
            active &= tn < 1.0
            if not active.any():
                break
            i = np.where(active, j, i)
            t = np.where(active, tn, t)
    return total


def _disc_primitive(u, h, r):
    """Odd primitive of 1/(r - sqrt(u^2 + h^2)) in u, vanishing at u = 0."""
    au = np.abs(u)
    a = np.sqrt((r - h) * (r + h))
    s = np.hypot(au, h)
    d = r - s
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (r / a) * (np.log(a + au) - np.log(d * (r + s)) + np.log(a * s + r * au)) \
            - np.log(au + s)
        # (1 - r/a) log h, written without cancellation
        val += np.where(h > 0.0, -h * h / (a * (r + a)) * np.log(np.where(h > 0.0, h, 1.0)), 0.0)
    return np.where(au == 0.0, 0.0, np.copysign(val, u))


def _disc_lengths(p, q, params):
    cx, cy, r = params[0]
    ex, ey = q[:, 0] - p[:, 0], q[:, 1] - p[:, 1]
    length = np.hypot(ex, ey)
    safe = np.where(length > 0.0, length, 1.0)
    ux, uy = ex / safe, ey / safe
    px, py = p[:, 0] - cx, p[:, 1] - cy
    u0 = px * ux + py * uy
    h = np.abs(px * uy - py * ux)
    out = _disc_primitive(u0 + length, h, r) - _disc_primitive(u0, h, r)
    return np.where(length > 0.0, out, 0.0)


def segment_lengths(p, q, kind, params):
    """Exact integral of 1/d along each segment ``[p_k, q_k]`` of a convex kernel domain."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    params = np.asarray(params, dtype=float)
    if kind == LINES:
        return _lines_lengths(p, q, params)
    if kind == DISC:
        return _disc_lengths(p, q, params)
    raise ValueError(f"unknown kernel domain kind {kind}")


def spec_distances(points, kind, params):
    points = np.asarray(points, dtype=float)
    params = np.asarray(params, dtype=float)
    if kind == LINES:
        return np.min(points @ params[:, :2].T - params[:, 2], axis=1)
    if kind == DISC:
        cx, cy, r = params[0]
        return r - np.hypot(points[:, 0] - cx, points[:, 1] - cy)
    raise ValueError(f"unknown kernel domain kind {kind}")


def _line_search(pts, idx, dvec, n_golden, cost, distance, admissible):
    prev, cur, nxt = pts[idx - 1], pts[idx], pts[idx + 1]
    reach = 0.5 * np.minimum(np.minimum(np.linalg.norm(cur - prev, axis=1),
                                        np.linalg.norm(nxt - cur, axis=1)), distance(cur))

    def f(t):
        moved = cur + t[:, None] * dvec[None, :]
        return cost(prev, moved) + cost(moved, nxt)

    best_t = np.zeros(len(idx))
    best_f = f(best_t)
    lo, hi = -reach, reach.copy()
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for it in range(n_golden + 1):
        for x, fx in ((x1, f1), (x2, f2)):
            better = fx < best_f
            best_f = np.where(better, fx, best_f)
            best_t = np.where(better, x, best_t)
        if it == n_golden:
            break
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new_x = np.where(left, hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo))
        f_new = f(new_x)
        x2, f2, x1, f1 = (np.where(left, x1, new_x), np.where(left, f1, f_new),
                          np.where(left, new_x, x2), np.where(left, f_new, f2))
    move = best_t != 0.0
    if not np.any(move):
        return
    moved = cur[move] + best_t[move, None] * dvec[None, :]
    sel = np.nonzero(move)[0]
    if admissible is not None:
        ok = admissible(prev[move], moved, nxt[move])
        sel, moved = sel[ok], moved[ok]
    pts[idx[sel]] = moved


def descend_generic(pts, cost, distance, admissible=None, max_sweeps=200, rel_tol=1e-7, n_golden=24):
    """Red-black coordinate descent of the interior vertices of a polyline.

    Each sweep moves every interior vertex (odd ones, then even ones) by a
    golden-section search along each of four fixed directions, within half
    the distance to its neighbours and to the boundary. ``cost(p, q)`` gives
    segment costs, ``distance`` boundary distances and ``admissible(prev,
    moved, next)`` (optional) vetoes moves. Stops when a sweep improves the
    total by less than ``rel_tol`` relative. Returns ``(points, sweeps)``.
    """
    pts = np.array(pts, dtype=float)
    n = len(pts)
    if n < 3:
        return pts, 0
    total = float(np.sum(cost(pts[:-1], pts[1:])))
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        before = total
        for color in (1, 2):
            idx = np.arange(color, n - 1, 2)
            if len(idx) == 0:
                continue
            for dvec in DIRECTIONS:
                _line_search(pts, idx, dvec, n_golden, cost, distance, admissible)
        total = float(np.sum(cost(pts[:-1], pts[1:])))
        if before - total < rel_tol * total:
            break
    return pts, sweeps


def descend(pts, kind, params, max_sweeps=200, rel_tol=1e-7, n_golden=24):
    """:func:`descend_generic` on a convex kernel domain with exact segment costs."""
    params = np.asarray(params, dtype=float)
    return descend_generic(pts, lambda p, q: segment_lengths(p, q, kind, params),
                           lambda x: spec_distances(x, kind, params),
                           None, max_sweeps, rel_tol, n_golden)


def _seg_d2(pts, a, b):
    e = b - a
    ll = np.einsum("...j,...j->...", e, e)
    rel = pts - a
    t = np.einsum("...j,...j->...", rel, e) / np.where(ll > 0.0, ll, 1.0)
    t = np.where(ll > 0.0, np.clip(t, 0.0, 1.0), 0.0)
    diff = rel - t[..., None] * e
    return np.einsum("...j,...j->...", diff, diff), t


def polyline_nearest(points, vertices, block, thickness):
    points = np.asarray(points, dtype=float)
    v = np.asarray(vertices, dtype=float)
    n, nb, m = len(v), len(thickness), len(points)
    starts = np.arange(nb) * block
    ends = np.minimum(starts + block, n)
    d2c, _ = _seg_d2(points[:, None, :], v[starts][None], v[ends % n][None])
    dc = np.sqrt(d2c)
    lb = dc - thickness[None, :]
    ub = np.min(dc + thickness[None, :], axis=1)
    rows, blocks = np.nonzero(lb - 1e-12 <= ub[:, None])
    offs = np.arange(block)
    segs = starts[blocks][:, None] + offs[None, :]
    valid = segs < ends[blocks][:, None]
    segs = np.where(valid, segs, starts[blocks][:, None])
    d2, t = _seg_d2(points[rows][:, None, :], v[segs], v[(segs + 1) % n])
    d2 = np.where(valid, d2, np.inf)
    # per point: smallest distance, ties to the lowest segment index
    flat_rows = np.repeat(rows, block)
    order = np.lexsort((segs.ravel(), d2.ravel(), flat_rows))
    first = order[np.r_[0, np.nonzero(np.diff(flat_rows[order]))[0] + 1]]
    out_d = np.empty(m)
    out_s = np.empty(m, dtype=np.int64)
    out_t = np.empty(m)
    out_d[flat_rows[first]] = np.sqrt(d2.ravel()[first])
    out_s[flat_rows[first]] = segs.ravel()[first]
    out_t[flat_rows[first]] = t.ravel()[first]
    return out_d, out_s, out_t
