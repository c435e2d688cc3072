"""Numerical quasi-hyperbolic distance.

``h_num`` runs Dijkstra on a lattice graph whose edge weights are the
quasi-hyperbolic lengths of the straight edges, then tightens the resulting
polyline with :func:`refine_path`. The returned bracket is
``[i_D(z, w), path_length(path)]``: the lower end is the closed-form
minorant and the upper end is the length of an admissible path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .closed_forms import h_exact_interval, i_dist
from .geometry import Domain, GeometryError, Interval, NotInteriorError, as_point

GL5_X, GL5_W = np.polynomial.legendre.leggauss(5)
GL8_X, GL8_W = np.polynomial.legendre.leggauss(8)

# Lattice offsets (i, j) with max(|i|, |j|) <= 3 and gcd(|i|, |j|) = 1.
STENCIL = [(i, j) for i in range(-3, 4) for j in range(-3, 4)
           if (i, j) != (0, 0) and math.gcd(abs(i), abs(j)) == 1]
HALF_STENCIL = [(i, j) for (i, j) in STENCIL if i > 0 or (i == 0 and j > 0)]

CLIP_FRACTION = 1.0 / 64.0
MAX_NODES = 3_000_000
PATH_TOL = 1e-9
MIN_BOUNDARY_GAP = 1e-12
# refined segments are also split when |seg| / min(d) exceeds this
MAX_SEGMENT_QH = 0.05
SPLIT_HYSTERESIS = 1.5


class PathError(GeometryError):
    """Path leaves the domain or quadrature cannot resolve it."""


class DisconnectedError(GeometryError):
    """Query points fall in different components of the lattice graph."""


@dataclass(eq=False)
class QHResult:
    upper: float
    lower: float
    path: np.ndarray
    resolution: float
    spacing: float = float("nan")
    nodes: int = 0

    @property
    def bracket_width(self) -> float:
        return self.upper - self.lower


@dataclass(eq=False)
class GridGraph:
    nodes: np.ndarray
    spacing: float
    delta: float
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    source: int
    target: int


@dataclass(eq=False)
class ConvergenceTable:
    rows: list = field(default_factory=list)  # (resolution, upper, bracket_width)
    order: float | None = None

    def uppers(self):
        return [r[1] for r in self.rows]


def _gl_lengths(domain: Domain, p, q, xs=GL5_X, ws=GL5_W):
    """Gauss-Legendre estimate of the integral of 1/d along each segment."""
    n = len(p)
    if n == 0:
        return np.zeros(0)
    s = 0.5 * (xs + 1.0)
    pts = p[:, None, :] + s[None, :, None] * (q - p)[:, None, :]
    d = domain.distance_many(pts.reshape(-1, p.shape[1])).reshape(n, len(xs))
    length = np.linalg.norm(q - p, axis=1)
    return 0.5 * length * np.sum(ws[None, :] / d, axis=1)


def edge_weights(domain: Domain, p, q, dp, dq):
    """Exact edge integrals where the domain has them; otherwise 5-point
    Gauss-Legendre per edge, split once where endpoint distances differ by more than 2x."""
    exact = domain.segment_qh_lengths(p, q)
    if exact is not None:
        return exact
    w = _gl_lengths(domain, p, q)
    split = np.maximum(dp, dq) > 2.0 * np.minimum(dp, dq)
    if np.any(split):
        mid = 0.5 * (p[split] + q[split])
        w[split] = _gl_lengths(domain, p[split], mid) + _gl_lengths(domain, mid, q[split])
    return w


def _interval_length(domain: Interval, x0, x1):
    """Exact integral of 1/min(t - a, b - t) over [x0, x1]."""
    lo, hi = min(x0, x1), max(x0, x1)
    a, b = domain.a, domain.b
    mid = 0.5 * (a + b) if math.isfinite(b) else math.inf
    total = 0.0
    if lo < mid:
        top = min(hi, mid)
        total += math.log((top - a) / (lo - a))
    if hi > mid:
        bottom = max(lo, mid)
        total += math.log((b - bottom) / (b - hi))
    return total


def _as_path(domain: Domain, path) -> np.ndarray:
    arr = np.asarray(path, dtype=float)
    if domain.dim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.dtype.kind == "c" or arr.ndim == 1:
        arr = np.array([as_point(p, 2) for p in path])
    return np.ascontiguousarray(arr)


def path_length(domain: Domain, path, tol: float = PATH_TOL) -> float:
    """Quasi-hyperbolic length of a polyline.

    Intervals, half-planes, discs and convex polygons use exact segment
    integrals; other domains cut segments at kinks of the distance function
    and use adaptive Gauss-Legendre (5 points against the two half-segments)
    until the local error estimate is below ``tol``.
    """
    pts = _as_path(domain, path)
    if len(pts) < 2:
        return 0.0
    if not np.all(domain.contains_many(pts)):
        raise PathError("path vertex is not interior")
    p, q = pts[:-1], pts[1:]
    moving = np.linalg.norm(q - p, axis=1) > 0
    p, q = p[moving], q[moving]
    if len(p) == 0:
        return 0.0
    if isinstance(domain, Interval):
        return float(sum(_interval_length(domain, a[0], b[0]) for a, b in zip(p, q)))
    if not np.all(domain.segments_inside(p, q)):
        raise PathError("path segment leaves the domain")
    exact = domain.segment_qh_lengths(p, q)
    if exact is not None:
        return float(np.sum(exact))
    p, q = _split_at_kinks(domain, p, q)
    return float(np.sum(_adaptive_lengths(domain, p, q, tol)))


def _split_at_kinks(domain, p, q, samples=16, iters=50):
    """Cut segments where the nearest boundary point jumps.

    There ``d`` has a kink that Gauss-Legendre error estimates cannot see.
    Jumps are detected on ``samples`` sub-steps and located by bisection.
    """
    n = len(p)
    probe = domain.nearest_points(p[:1])
    if probe is None:
        return p, q
    ts = np.linspace(0.0, 1.0, samples + 1)
    e = q - p
    length = np.linalg.norm(e, axis=1)
    pts = p[:, None, :] + ts[None, :, None] * e[:, None, :]
    feet = domain.nearest_points(pts.reshape(-1, 2)).reshape(n, samples + 1, 2)
    slack = 4.0 * length[:, None] / samples + 1e-12
    seg, k = np.nonzero(np.linalg.norm(np.diff(feet, axis=1), axis=2) > slack)
    if len(seg) == 0:
        return p, q
    lo, hi = ts[k], ts[k + 1]
    f_lo = feet[seg, k]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = domain.nearest_points(p[seg] + mid[:, None] * e[seg])
        near = np.linalg.norm(f_mid - f_lo, axis=1) <= 4.0 * (mid - lo) * length[seg] + 1e-12
        lo = np.where(near, mid, lo)
        f_lo = np.where(near[:, None], f_mid, f_lo)
        hi = np.where(near, hi, mid)
    new_p, new_q = [], []
    for i in range(n):
        cuts = np.unique(np.concatenate([[0.0], hi[seg == i], [1.0]]))
        nodes = p[i] + cuts[:, None] * e[i]
        new_p.append(nodes[:-1])
        new_q.append(nodes[1:])
    return np.vstack(new_p), np.vstack(new_q)


def _adaptive_lengths(domain, p, q, tol, max_depth=40):
    total = np.zeros(len(p))
    owner = np.arange(len(p))
    budget = np.full(len(p), tol)
    coarse = _gl_lengths(domain, p, q)
    for _ in range(max_depth):
        mid = 0.5 * (p + q)
        left = _gl_lengths(domain, p, mid)
        right = _gl_lengths(domain, mid, q)
        fine = left + right
        done = np.abs(fine - coarse) < budget
        np.add.at(total, owner[done], fine[done])
        if np.all(done):
            return total
        keep = ~done
        gap = np.min(domain.distance_many(np.concatenate([p[keep], q[keep]])))
        if gap < MIN_BOUNDARY_GAP:
            raise PathError("segment approaches the boundary closer than 1e-12")
        p, mid, q = p[keep], mid[keep], q[keep]
        owner = np.repeat(owner[keep], 2)
        budget = np.repeat(budget[keep] / 2.0, 2)
        coarse = np.column_stack([left[keep], right[keep]]).reshape(-1)
        p, q = (np.column_stack([p, mid]).reshape(-1, p.shape[1]),
                np.column_stack([mid, q]).reshape(-1, p.shape[1]))
    raise PathError("adaptive quadrature did not converge")


def _segment_costs(domain, p, q):
    exact = domain.segment_qh_lengths(p, q)
    if exact is not None:
        return exact
    return _gl_lengths(domain, p, q, GL8_X, GL8_W)


def _split_mask(domain, pts, spacing, slack=1.0):
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    d = domain.distance_many(pts)
    lo, hi = np.minimum(d[:-1], d[1:]), np.maximum(d[:-1], d[1:])
    return ((seg > slack * spacing) | (seg > slack * MAX_SEGMENT_QH * lo)
            | ((hi > 2.0 * slack * lo) & (seg > 1e-9 * lo)))


def _split_once(pts, mask):
    mids = 0.5 * (pts[:-1][mask] + pts[1:][mask])
    return np.insert(pts, np.nonzero(mask)[0] + 1, mids, axis=0)


def _decimate(domain, pts, keep_at_least=5):
    """Drop vertices (every other one, repeatedly) while chords stay admissible."""
    while len(pts) > 2 * keep_at_least:
        idx = np.arange(0, len(pts), 2)
        if idx[-1] != len(pts) - 1:
            idx = np.append(idx, len(pts) - 1)
        coarse = pts[idx]
        if not np.all(domain.segments_inside(coarse[:-1], coarse[1:])):
            break
        pts = coarse
    return pts


def _admissible(domain):
    if domain.convex:
        return None

    def check(prev, moved, nxt):
        ok = domain.contains_many(moved)
        ok &= domain.segments_inside(prev, moved)
        ok &= domain.segments_inside(moved, nxt)
        return ok
    return check


def _descend(domain, pts, max_sweeps, rel_tol):
    spec = domain.kernel_spec()
    if spec is not None:
        return kernels.descend(np.ascontiguousarray(pts), spec[0], spec[1], max_sweeps, rel_tol)
    return kernels.descend_generic(pts, lambda p, q: _segment_costs(domain, p, q),
                                   domain.distance_many, _admissible(domain), max_sweeps, rel_tol)


def refine_path(domain: Domain, path, resolution: float | None = None,
                max_sweeps: int = 200, rel_tol: float = 1e-7, max_vertices: int = 20000) -> np.ndarray:
    """Shorten an admissible path; the result is never longer than the input.

    Works coarse to fine: the path is first thinned while its chords stay in
    the domain, then each level moves interior vertices by golden-section
    searches along four fixed directions until the relative improvement per
    sweep drops below ``rel_tol`` (at most ``max_sweeps`` sweeps), and splits
    at their midpoints the segments longer than ``resolution`` or whose
    endpoint boundary distances differ by more than 2x.
    """
    pts = _as_path(domain, path)
    if len(pts) < 2 or isinstance(domain, Interval):
        return pts
    original = path_length(domain, pts)
    if resolution is None:
        resolution = float(np.max(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    if resolution <= 0:
        return pts
    refined = _decimate(domain, pts)
    for _ in range(64):
        refined, _ = _descend(domain, refined, max_sweeps, rel_tol)
        # descent stretches some segments; only a 1.5x overshoot triggers another level
        mask = _split_mask(domain, refined, resolution)
        if not np.any(_split_mask(domain, refined, resolution, SPLIT_HYSTERESIS)) \
                or len(refined) + mask.sum() > max_vertices:
            break
        refined = _split_once(refined, mask)
    try:
        new = path_length(domain, refined)
    except PathError:
        return pts
    return refined if new <= original else pts


def _lattice_spacing(resolution, z, w, dz, dw):
    scale = max(float(np.linalg.norm(z - w)), min(dz, dw))
    spacing = resolution
    while spacing > scale / 4.0:
        spacing /= 2.0
    return spacing


def _search_box(domain, z, w, dz, dw, full=False):
    bb = domain.bbox()
    if full and bb is not None:
        return bb[0].copy(), bb[1].copy()
    margin = 0.6 * float(np.linalg.norm(z - w)) + 0.25 * max(dz, dw)
    lo = np.minimum(z, w) - margin
    hi = np.maximum(z, w) + margin
    if bb is not None:
        lo, hi = np.maximum(lo, bb[0]), np.minimum(hi, bb[1])
    return lo, hi


def build_graph(domain: Domain, z, w, spacing: float, delta: float, box) -> GridGraph:
    """Lattice graph on ``box`` clipped to ``{d >= delta}`` with ``z`` and ``w`` injected."""
    lo, hi = box
    i0, i1 = math.ceil(lo[0] / spacing), math.floor(hi[0] / spacing)
    j0, j1 = math.ceil(lo[1] / spacing), math.floor(hi[1] / spacing)
    nx, ny = max(i1 - i0 + 1, 0), max(j1 - j0 + 1, 0)
    if nx * ny > MAX_NODES:
        raise GeometryError(f"lattice of {nx * ny} nodes exceeds the limit; use a coarser resolution")
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
    grid_pts = np.column_stack([ii.ravel() * spacing, jj.ravel() * spacing])
    if len(grid_pts):
        inside = domain.contains_many(grid_pts)
        dist = np.where(inside, domain.distance_many(grid_pts), 0.0)
        keep = inside & (dist >= delta)
        # a lattice node on a query point is replaced by the injected node
        for q in (z, w):
            keep &= np.linalg.norm(grid_pts - q, axis=1) > 1e-12 * spacing
    else:
        keep = np.zeros(0, dtype=bool)
        dist = np.zeros(0)
    ids = np.full(nx * ny, -1, dtype=np.int64)
    ids[keep] = np.arange(int(keep.sum()))
    ids = ids.reshape(nx, ny)
    nodes = grid_pts[keep]
    node_d = dist[keep]
    n_lattice = len(nodes)

    us, vs, ws = [], [], []
    for di, dj in HALF_STENCIL:
        ia0, ia1 = max(0, -di), nx - max(0, di)
        ja0, ja1 = max(0, -dj), ny - max(0, dj)
        if ia1 <= ia0 or ja1 <= ja0:
            continue
        a = ids[ia0:ia1, ja0:ja1]
        b = ids[ia0 + di:ia1 + di, ja0 + dj:ja1 + dj]
        ok = (a >= 0) & (b >= 0)
        u, v = a[ok], b[ok]
        if len(u) == 0:
            continue
        if not domain.convex:
            inside = domain.segments_inside(nodes[u], nodes[v])
            u, v = u[inside], v[inside]
        us.append(u)
        vs.append(v)
        ws.append(edge_weights(domain, nodes[u], nodes[v], node_d[u], node_d[v]))

    # inject the query points
    dz = float(domain.distance_many(z[None, :])[0])
    dw = float(domain.distance_many(w[None, :])[0])
    all_nodes = np.vstack([nodes, z[None, :], w[None, :]])
    all_d = np.concatenate([node_d, [dz, dw]])
    src, dst = n_lattice, n_lattice + 1
    # reach of the stencil, so an injected node has every edge a lattice node there would have
    radius = math.sqrt(10.0) * spacing * (1.0 + 1e-12)
    for qi, q in ((src, z), (dst, w)):
        if n_lattice:
            near = np.nonzero(np.linalg.norm(nodes - q, axis=1) <= radius)[0]
        else:
            near = np.zeros(0, dtype=np.int64)
        u = np.full(len(near), qi, dtype=np.int64)
        if len(near):
            inside = domain.segments_inside(np.repeat(q[None, :], len(near), axis=0), nodes[near])
            u, near = u[inside], near[inside]
        us.append(u)
        vs.append(near)
        ws.append(edge_weights(domain, all_nodes[u], all_nodes[near], all_d[u], all_d[near]))
    if np.linalg.norm(z - w) <= radius and domain.segments_inside(z[None, :], w[None, :])[0]:
        us.append(np.array([src]))
        vs.append(np.array([dst]))
        ws.append(edge_weights(domain, z[None, :], w[None, :], np.array([dz]), np.array([dw])))

    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    wt = np.concatenate(ws) if ws else np.zeros(0)
    heads = np.concatenate([u, v]).astype(np.int64)
    tails = np.concatenate([v, u]).astype(np.int64)
    weights = np.concatenate([wt, wt])
    order = np.lexsort((tails, heads))
    heads, tails, weights = heads[order], tails[order], weights[order]
    n_total = n_lattice + 2
    indptr = np.zeros(n_total + 1, dtype=np.int64)
    np.cumsum(np.bincount(heads, minlength=n_total), out=indptr[1:])
    return GridGraph(all_nodes, spacing, delta, indptr, np.ascontiguousarray(tails),
                     np.ascontiguousarray(weights), src, dst)


def shortest_lattice_path(graph: GridGraph):
    dist, pred = kernels.dijkstra(graph.indptr, graph.indices, graph.weights, graph.source, graph.target)
    if not math.isfinite(dist):
        raise DisconnectedError("query points are in different graph components; refine the resolution")
    chain = [graph.target]
    while chain[-1] != graph.source:
        chain.append(int(pred[chain[-1]]))
    return dist, graph.nodes[chain[::-1]]


def h_num(domain: Domain, z, w, resolution: float = 0.02, warm_start=None,
          refine: bool = True) -> QHResult:
    """Bracket ``[i_D, admissible path length]`` for the quasi-hyperbolic distance.

    ``resolution`` caps the lattice spacing; for pairs whose separation and
    boundary distances are small compared with it, the spacing is halved
    until it is at most a quarter of ``max(|z - w|, min(d(z), d(w)))``.
    ``warm_start`` is an admissible path from a previous solve; the shorter
    of the two refined paths is returned.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    z = as_point(z, domain.dim)
    w = as_point(w, domain.dim)
    for p in (z, w):
        if not domain.contains(p):
            raise NotInteriorError(f"point {p} is not interior")
    dz = float(domain.distance_many(z[None, :])[0])
    dw = float(domain.distance_many(w[None, :])[0])
    r = float(np.linalg.norm(z - w))
    lower = i_dist(dz, dw, r)
    if r == 0.0:
        return QHResult(0.0, 0.0, z[None, :].copy(), resolution)
    if isinstance(domain, Interval):
        value = h_exact_interval(domain, z[0], w[0])
        return QHResult(value, lower, np.vstack([z, w]), resolution)

    # solve in a canonical orientation so h(z, w) and h(w, z) agree exactly
    flip = tuple(z) > tuple(w)
    a, b = (w, z) if flip else (z, w)
    da, db = (dw, dz) if flip else (dz, dw)
    spacing = _lattice_spacing(resolution, a, b, da, db)
    delta = min(da, db) * CLIP_FRACTION
    graph = build_graph(domain, a, b, spacing, delta, _search_box(domain, a, b, da, db))
    try:
        _, path = shortest_lattice_path(graph)
    except DisconnectedError:
        if domain.bbox() is None:
            raise
        graph = build_graph(domain, a, b, spacing, delta, _search_box(domain, a, b, da, db, full=True))
        _, path = shortest_lattice_path(graph)
    straight = np.vstack([a, b])
    if domain.segments_inside(a[None, :], b[None, :])[0] and \
            path_length(domain, straight) < path_length(domain, path):
        path = straight
    if refine:
        path = refine_path(domain, path, spacing)
    upper = path_length(domain, path)
    if warm_start is not None:
        warm = _as_path(domain, warm_start)
        if flip:
            warm = warm[::-1]
        if np.allclose(warm[0], a) and np.allclose(warm[-1], b):
            warm = np.vstack([a, warm[1:-1], b])
            warm = refine_path(domain, warm, spacing) if refine else warm
            warm_len = path_length(domain, warm)
            if warm_len < upper:
                path, upper = warm, warm_len
    if flip:
        path = path[::-1]
        upper = path_length(domain, path)
    return QHResult(upper, lower, path, resolution, spacing, len(graph.nodes))


def convergence_study(domain: Domain, z, w, resolutions) -> ConvergenceTable:
    """Uppers at decreasing resolutions, each solve warm-started from the previous path.

    The order estimate is ``log((U1 - U2) / (U2 - U3)) / log(r1 / r2)`` from
    the last three rows when those differences are positive.
    """
    resolutions = [float(r) for r in resolutions]
    if len(resolutions) < 3:
        raise ValueError("need at least three resolutions")
    if any(b >= a for a, b in zip(resolutions, resolutions[1:])):
        raise ValueError("resolutions must be decreasing")
    table = ConvergenceTable()
    warm = None
    for res in resolutions:
        result = h_num(domain, z, w, res, warm_start=warm)
        warm = result.path
        table.rows.append((res, result.upper, result.bracket_width))
    u1, u2, u3 = [row[1] for row in table.rows[-3:]]
    r1, r2 = resolutions[-3], resolutions[-2]
    if u1 - u2 > 0 and u2 - u3 > 0:
        table.order = math.log((u1 - u2) / (u2 - u3)) / math.log(r1 / r2)
    return table
