# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: lattice Dijkstra, point-to-segment distances, winding
numbers, exact segment lengths on convex domains and path descent.

Mirrors ``_pykernels`` exactly; both must return identical results.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, log, log1p, copysign, INFINITY

cnp.import_array()


cdef inline bint _less(double da, long long na, double db, long long nb) nogil:
    return da < db or (da == db and na < nb)


cdef void _sift_down(double[::1] key, long long[::1] node, Py_ssize_t size, Py_ssize_t pos) noexcept nogil:
    cdef Py_ssize_t child
    cdef double k = key[pos]
    cdef long long n = node[pos]
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and _less(key[child + 1], node[child + 1], key[child], node[child]):
            child += 1
        if _less(key[child], node[child], k, n):
            key[pos] = key[child]
            node[pos] = node[child]
            pos = child
        else:
            break
    key[pos] = k
    node[pos] = n


cdef void _sift_up(double[::1] key, long long[::1] node, Py_ssize_t pos) noexcept nogil:
    cdef Py_ssize_t parent
    cdef double k = key[pos]
    cdef long long n = node[pos]
    while pos > 0:
        parent = (pos - 1) // 2
        if _less(k, n, key[parent], node[parent]):
            key[pos] = key[parent]
            node[pos] = node[parent]
            pos = parent
        else:
            break
    key[pos] = k
    node[pos] = n


def dijkstra(const long long[::1] indptr, const long long[::1] indices,
             const double[::1] weights, long long source, long long target):
    """Single-pair Dijkstra on a CSR graph.

    Ties are broken by node index. Returns ``(distance, predecessors)``;
    distance is ``inf`` when the target is unreachable.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, np.inf)
    pred_arr = np.full(n, -1, dtype=np.int64)
    done_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] pred = pred_arr
    cdef unsigned char[::1] done = done_arr

    cdef Py_ssize_t cap = max(16, indices.shape[0] + 1)
    heap_key_arr = np.empty(cap)
    heap_node_arr = np.empty(cap, dtype=np.int64)
    cdef double[::1] hkey = heap_key_arr
    cdef long long[::1] hnode = heap_node_arr
    cdef Py_ssize_t size = 0

    cdef long long u, v
    cdef double d, nd
    cdef Py_ssize_t e

    with nogil:
        dist[source] = 0.0
        hkey[0] = 0.0
        hnode[0] = source
        size = 1
        while size > 0:
            d = hkey[0]
            u = hnode[0]
            size -= 1
            if size > 0:
                hkey[0] = hkey[size]
                hnode[0] = hnode[size]
                _sift_down(hkey, hnode, size, 0)
            if done[u]:
                continue
            done[u] = 1
            if u == target:
                break
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if done[v]:
                    continue
                nd = d + weights[e]
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    hkey[size] = nd
                    hnode[size] = v
                    size += 1
                    _sift_up(hkey, hnode, size - 1)
    return float(dist_arr[target]), pred_arr


def segment_distances(const double[:, ::1] points, const double[:, ::1] a,
                      const double[:, ::1] b):
    """Distance from each point to the nearest of the segments ``[a_k, b_k]``."""
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t ne = a.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double px, py, ax, ay, ex, ey, t, dx, dy, best, dd, ll
    with nogil:
        for i in range(m):
            px = points[i, 0]
            py = points[i, 1]
            best = INFINITY
            for k in range(ne):
                ax = a[k, 0]
                ay = a[k, 1]
                ex = b[k, 0] - ax
                ey = b[k, 1] - ay
                ll = ex * ex + ey * ey
                if ll > 0.0:
                    t = ((px - ax) * ex + (py - ay) * ey) / ll
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                dx = px - (ax + t * ex)
                dy = py - (ay + t * ey)
                dd = dx * dx + dy * dy
                if dd < best:
                    best = dd
            out[i] = sqrt(best)
    return out_arr


def winding_numbers(const double[:, ::1] points, const double[:, ::1] vertices):
    """Winding number of the closed polyline ``vertices`` around each point."""
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t nv = vertices.shape[0]
    out_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double px, py, x0, y0, x1, y1, cross
    cdef long long wn
    with nogil:
        for i in range(m):
            px = points[i, 0]
            py = points[i, 1]
            wn = 0
            for k in range(nv):
                x0 = vertices[k, 0]
                y0 = vertices[k, 1]
                x1 = vertices[(k + 1) % nv, 0]
                y1 = vertices[(k + 1) % nv, 1]
                cross = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
                if y0 <= py:
                    if y1 > py and cross > 0.0:
                        wn += 1
                else:
                    if y1 <= py and cross < 0.0:
                        wn -= 1
            out[i] = wn
    return out_arr


# kernel domain kinds, shared with _pykernels
DEF LINES = 1
DEF DISC = 2
cdef double GOLDEN = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _log_ratio(double x) noexcept nogil:
    if fabs(x) < 1e-8:
        return 1.0 - x / 2.0 + x * x / 3.0
    return log1p(x) / x


cdef double _lines_length(const double[:, ::1] P, double px, double py,
                          double qx, double qy) noexcept nogil:
    cdef Py_ssize_t m = P.shape[0]
    cdef Py_ssize_t k, i = 0, j, it
    cdef double ex = qx - px, ey = qy - py
    cdef double length = hypot(ex, ey)
    cdef double ak, bk, ai, bi, amin = INFINITY, bmin = INFINITY
    cdef double t = 0.0, tn, tc, l0, total = 0.0
    for k in range(m):
        ak = P[k, 0] * px + P[k, 1] * py - P[k, 2]
        if ak < amin:
            amin = ak
    for k in range(m):
        ak = P[k, 0] * px + P[k, 1] * py - P[k, 2]
        bk = P[k, 0] * ex + P[k, 1] * ey
        if ak == amin and bk < bmin:
            bmin = bk
            i = k
    for it in range(m + 1):
        ai = P[i, 0] * px + P[i, 1] * py - P[i, 2]
        bi = P[i, 0] * ex + P[i, 1] * ey
        tn = INFINITY
        j = 0
        for k in range(m):
            ak = P[k, 0] * px + P[k, 1] * py - P[k, 2]
            bk = P[k, 0] * ex + P[k, 1] * ey
            if bk < bi:
                tc = (ak - ai) / (bi - bk)
                if tc >= t and tc < tn:
                    tn = tc
                    j = k
        if tn > 1.0:
            tn = 1.0
        l0 = ai + bi * t
        total += length * (tn - t) * _log_ratio(bi * (tn - t) / l0) / l0
        if tn >= 1.0:
            break
        i = j
        t = tn
    return total


cdef double _disc_primitive(double u, double h, double r) noexcept nogil:
    cdef double au = fabs(u)
    if au == 0.0:
        return 0.0
    cdef double a = sqrt((r - h) * (r + h))
    cdef double s = hypot(au, h)
    cdef double d = r - s
    cdef double val = (r / a) * (log(a + au) - log(d * (r + s)) + log(a * s + r * au)) - log(au + s)
    if h > 0.0:
        val += -h * h / (a * (r + a)) * log(h)
    return copysign(val, u)


cdef double _disc_length(const double[:, ::1] P, double px, double py,
                         double qx, double qy) noexcept nogil:
    cdef double ex = qx - px, ey = qy - py
    cdef double length = hypot(ex, ey)
    if length == 0.0:
        return 0.0
    cdef double ux = ex / length, uy = ey / length
    cdef double cx = px - P[0, 0], cy = py - P[0, 1]
    cdef double u0 = cx * ux + cy * uy
    cdef double h = fabs(cx * uy - cy * ux)
    return _disc_primitive(u0 + length, h, P[0, 2]) - _disc_primitive(u0, h, P[0, 2])


cdef inline double _seg(int kind, const double[:, ::1] P, double px, double py,
                        double qx, double qy) noexcept nogil:
    if kind == LINES:
        return _lines_length(P, px, py, qx, qy)
    return _disc_length(P, px, py, qx, qy)


cdef double _dist(int kind, const double[:, ::1] P, double x, double y) noexcept nogil:
    cdef Py_ssize_t k
    cdef double best = INFINITY, v
    if kind == LINES:
        for k in range(P.shape[0]):
            v = P[k, 0] * x + P[k, 1] * y - P[k, 2]
            if v < best:
                best = v
        return best
    return P[0, 2] - hypot(x - P[0, 0], y - P[0, 1])


def _check_kind(int kind):
    if kind != LINES and kind != DISC:
        raise ValueError(f"unknown kernel domain kind {kind}")


def segment_lengths(p, q, int kind, params):
    """Exact integral of 1/d along each segment ``[p_k, q_k]`` of a convex kernel domain."""
    _check_kind(kind)
    cdef const double[:, ::1] pp = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[:, ::1] qq = np.ascontiguousarray(q, dtype=np.float64)
    cdef const double[:, ::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef Py_ssize_t n = pp.shape[0], k
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for k in range(n):
            out[k] = _seg(kind, P, pp[k, 0], pp[k, 1], qq[k, 0], qq[k, 1])
    return out_arr


def spec_distances(points, int kind, params):
    _check_kind(kind)
    cdef const double[:, ::1] x = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] P = np.ascontiguousarray(params, dtype=np.float64)
    out_arr = np.empty(x.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k
    with nogil:
        for k in range(x.shape[0]):
            out[k] = _dist(kind, P, x[k, 0], x[k, 1])
    return out_arr


cdef inline double _pair(int kind, const double[:, ::1] P, double[:, ::1] v,
                         Py_ssize_t k, double x, double y) noexcept nogil:
    return _seg(kind, P, v[k - 1, 0], v[k - 1, 1], x, y) + _seg(kind, P, x, y, v[k + 1, 0], v[k + 1, 1])


cdef void _line_search(int kind, const double[:, ::1] P, double[:, ::1] v, Py_ssize_t k,
                       double dx, double dy, int n_golden) noexcept nogil:
    cdef double cx = v[k, 0], cy = v[k, 1]
    cdef double reach = hypot(cx - v[k - 1, 0], cy - v[k - 1, 1])
    cdef double tmp = hypot(v[k + 1, 0] - cx, v[k + 1, 1] - cy)
    if tmp < reach:
        reach = tmp
    tmp = _dist(kind, P, cx, cy)
    if tmp < reach:
        reach = tmp
    reach *= 0.5
    cdef double best_t = 0.0
    cdef double best_f = _pair(kind, P, v, k, cx, cy)
    cdef double lo = -reach, hi = reach
    cdef double x1 = hi - GOLDEN * (hi - lo)
    cdef double x2 = lo + GOLDEN * (hi - lo)
    cdef double f1 = _pair(kind, P, v, k, cx + x1 * dx, cy + x1 * dy)
    cdef double f2 = _pair(kind, P, v, k, cx + x2 * dx, cy + x2 * dy)
    cdef double nx, fn
    cdef int it
    for it in range(n_golden + 1):
        if f1 < best_f:
            best_f = f1
            best_t = x1
        if f2 < best_f:
            best_f = f2
            best_t = x2
        if it == n_golden:
            break
        if f1 < f2:
            hi = x2
            nx = hi - GOLDEN * (hi - lo)
            fn = _pair(kind, P, v, k, cx + nx * dx, cy + nx * dy)
            x2, f2 = x1, f1
            x1, f1 = nx, fn
        else:
            lo = x1
            nx = lo + GOLDEN * (hi - lo)
            fn = _pair(kind, P, v, k, cx + nx * dx, cy + nx * dy)
            x1, f1 = x2, f2
            x2, f2 = nx, fn
    if best_t != 0.0:
        v[k, 0] = cx + best_t * dx
        v[k, 1] = cy + best_t * dy


cdef double _total(int kind, const double[:, ::1] P, double[:, ::1] v) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t k
    for k in range(v.shape[0] - 1):
        s += _seg(kind, P, v[k, 0], v[k, 1], v[k + 1, 0], v[k + 1, 1])
    return s


def descend(pts, int kind, params, int max_sweeps=200, double rel_tol=1e-7, int n_golden=24):
    """Red-black golden-section coordinate descent on a convex kernel domain.

    Same iteration as ``_pykernels.descend``; returns ``(points, sweeps)``.
    """
    _check_kind(kind)
    out_arr = np.array(pts, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] v = out_arr
    cdef const double[:, ::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], k
    cdef int sweeps = 0, color, di
    cdef double total, before
    cdef double r2 = sqrt(0.5)
    cdef double ddx[4]
    cdef double ddy[4]
    ddx[0], ddy[0] = 1.0, 0.0
    ddx[1], ddy[1] = 0.0, 1.0
    ddx[2], ddy[2] = r2, r2
    ddx[3], ddy[3] = r2, -r2
    if n < 3:
        return out_arr, 0
    with nogil:
        total = _total(kind, P, v)
        for sweeps in range(1, max_sweeps + 1):
            before = total
            for color in range(1, 3):
                for di in range(4):
                    k = color
                    while k < n - 1:
                        _line_search(kind, P, v, k, ddx[di], ddy[di], n_golden)
                        k += 2
            total = _total(kind, P, v)
            if before - total < rel_tol * total:
                break
    return out_arr, sweeps


cdef inline double _seg_d2(double px, double py, double ax, double ay,
                           double bx, double by, double* t_out) noexcept nogil:
    cdef double ex = bx - ax, ey = by - ay
    cdef double ll = ex * ex + ey * ey
    cdef double t = 0.0
    if ll > 0.0:
        t = ((px - ax) * ex + (py - ay) * ey) / ll
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    t_out[0] = t
    ex = px - (ax + t * ex)
    ey = py - (ay + t * ey)
    return ex * ex + ey * ey


def polyline_nearest(const double[:, ::1] points, const double[:, ::1] vertices,
                     Py_ssize_t block, const double[::1] thickness):
    """Nearest point on a closed polyline: ``(distance, segment, parameter)``.

    Segments are grouped in blocks of ``block``; a block whose chord distance
    minus its thickness exceeds the best chord-plus-thickness bound is skipped.
    """
    cdef Py_ssize_t m = points.shape[0], n = vertices.shape[0]
    cdef Py_ssize_t nb = thickness.shape[0]
    dist_arr = np.empty(m)
    seg_arr = np.empty(m, dtype=np.int64)
    t_arr = np.empty(m)
    lb_arr = np.empty(nb)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] seg = seg_arr
    cdef double[::1] tout = t_arr
    cdef double[::1] lb = lb_arr
    cdef Py_ssize_t i, k, j, j0, j1, jn, best_j
    cdef double px, py, ub, dc, best, d2, t, best_t
    with nogil:
        for i in range(m):
            px = points[i, 0]
            py = points[i, 1]
            ub = INFINITY
            for k in range(nb):
                j0 = k * block
                j1 = j0 + block
                if j1 > n:
                    j1 = n
                dc = sqrt(_seg_d2(px, py, vertices[j0, 0], vertices[j0, 1],
                                  vertices[j1 % n, 0], vertices[j1 % n, 1], &t))
                lb[k] = dc - thickness[k]
                if dc + thickness[k] < ub:
                    ub = dc + thickness[k]
            best = INFINITY
            best_j = 0
            best_t = 0.0
            for k in range(nb):
                if lb[k] - 1e-12 > ub or (lb[k] > 0.0 and lb[k] * lb[k] > best):
                    continue
                j0 = k * block
                j1 = j0 + block
                if j1 > n:
                    j1 = n
                for j in range(j0, j1):
                    jn = j + 1
                    if jn == n:
                        jn = 0
                    d2 = _seg_d2(px, py, vertices[j, 0], vertices[j, 1],
                                 vertices[jn, 0], vertices[jn, 1], &t)
                    if d2 < best:
                        best = d2
                        best_j = j
                        best_t = t
            dist[i] = sqrt(best)
            seg[i] = best_j
            tout[i] = best_t
    return dist_arr, seg_arr, t_arr
