"""Planar and one-dimensional domains.

Each domain answers membership, Euclidean distance to the boundary and
boundary sampling. Vectorized ``*_many`` methods take ``(M, dim)`` arrays;
they skip the interior checks that the scalar module-level functions make.

Domain JSON (field names are part of the file format)::

    {"type": "disc", "center": [0, 0], "radius": 1}
    {"type": "half_plane", "normal": [1, 0], "offset": 0}
    {"type": "interval", "a": 0, "b": 1}          # "b": null means +inf
    {"type": "polygon", "vertices": [[x, y], ...]}
    {"type": "mapped_disc", "map": "npt_example"}
    {"type": "boundary_curve", "points": [[x, y], ...]}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from . import conformal
from . import kernels

TIE_TOL = 1e-12
MAPPED_DISC_POINTS = 2 ** 16
NEAREST_BLOCK = 256


class GeometryError(ValueError):
    pass


class DimensionError(GeometryError):
    pass


class NotInteriorError(GeometryError):
    pass


class SpecError(ValueError):
    """Malformed domain description."""


def as_point(p, dim: int) -> np.ndarray:
    """Coerce ``p`` (sequence, scalar, or complex for planar points) to a float array."""
    if dim == 2 and np.ndim(p) == 0:
        p = complex(p)
        p = (p.real, p.imag)
    arr = np.atleast_1d(np.asarray(p, dtype=float)).reshape(-1)
    if arr.shape != (dim,):
        raise DimensionError(f"expected a point of dimension {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class BoundaryPatch:
    points: np.ndarray
    normals: np.ndarray
    arclength: np.ndarray

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class DiniModulus:
    t: np.ndarray  # decreasing
    omega: np.ndarray

    def __post_init__(self):
        if len(self.t) != len(self.omega):
            raise ValueError("t and omega must have equal length")

    @property
    def omega_at_zero(self) -> float:
        """Estimate of ``omega(0+)``: the value at the smallest tabulated t."""
        if len(self.t) == 0:
            raise ValueError("empty modulus table")
        return float(self.omega[np.argmin(self.t)])

    def is_monotone(self) -> bool:
        order = np.argsort(self.t)
        return bool(np.all(np.diff(self.omega[order]) >= -1e-15))


class Domain:
    dim = 2
    convex = False
    bounded = True
    kind = ""

    def contains(self, p) -> bool:
        p = as_point(p, self.dim)
        return bool(self.contains_many(p[None, :])[0])

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary_distance(self, p) -> float:
        p = as_point(p, self.dim)
        if not self.contains(p):
            raise NotInteriorError(f"point {p} is not interior to {self.kind}")
        return float(self.distance_many(p[None, :])[0])

    def bbox(self):
        """``(lo, hi)`` corner arrays, or None for unbounded domains."""
        return None

    def sample_boundary(self, m: int) -> BoundaryPatch:
        raise NotImplementedError

    def kernel_spec(self):
        """``(kind, params)`` for the compiled convex kernels, or None."""
        return None

    def segment_qh_lengths(self, p: np.ndarray, q: np.ndarray):
        """Exact quasi-hyperbolic lengths of segments, or None when unavailable."""
        spec = self.kernel_spec()
        if spec is None:
            return None
        return kernels.segment_lengths(np.ascontiguousarray(p, dtype=float),
                                       np.ascontiguousarray(q, dtype=float), *spec)

    def nearest_points(self, pts: np.ndarray):
        """Nearest boundary points, where the domain tracks them (else None)."""
        return None

    def segments_inside(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Whether each segment ``[p_k, q_k]`` lies in the domain.

        Endpoints are assumed interior. For non-convex domains a segment is
        accepted when seven sample points are interior and consecutive
        sample points are closer than the sum of their boundary distances,
        so the segment is covered by interior discs.
        """
        if self.convex:
            return np.ones(len(p), dtype=bool)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        length = np.linalg.norm(q - p, axis=1)
        # two endpoint balls already cover short segments
        out = length < self.distance_many(p) + self.distance_many(q)
        rest = np.nonzero(~out)[0]
        if len(rest) == 0:
            return out
        p, q = p[rest], q[rest]
        ts = np.linspace(0.0, 1.0, 7)
        pts = p[:, None, :] + ts[None, :, None] * (q - p)[:, None, :]
        flat = pts.reshape(-1, self.dim)
        inside = self.contains_many(flat).reshape(len(p), -1)
        dist = self.distance_many(flat).reshape(len(p), -1)
        gap = length[rest][:, None] / (len(ts) - 1)
        covered = gap < dist[:, :-1] + dist[:, 1:]
        out[rest] = inside.all(axis=1) & covered.all(axis=1)
        return out

    def to_json(self) -> dict:
        raise NotImplementedError


class HalfPlane(Domain):
    kind = "half_plane"
    convex = True
    bounded = False

    def __init__(self, normal=(1.0, 0.0), offset: float = 0.0):
        n = np.asarray(normal, dtype=float).reshape(-1)
        if n.shape != (2,) or not np.linalg.norm(n) > 0:
            raise SpecError("half_plane normal must be a nonzero 2-vector")
        self.normal = n / np.linalg.norm(n)
        self.offset = float(offset)

    def contains_many(self, pts):
        return pts @ self.normal - self.offset > TIE_TOL

    def distance_many(self, pts):
        return np.abs(pts @ self.normal - self.offset)

    def kernel_spec(self):
        return kernels.LINES, np.array([[self.normal[0], self.normal[1], self.offset]])

    def sample_boundary(self, m, span: float = 1.0):
        if m < 3:
            raise ValueError("need m >= 3 boundary samples")
        foot = self.offset * self.normal
        tangent = np.array([-self.normal[1], self.normal[0]])
        s = (np.arange(m) - (m - 1) / 2.0) * (span / m)
        pts = foot[None, :] + s[:, None] * tangent[None, :]
        normals = np.tile(self.normal, (m, 1))
        return BoundaryPatch(pts, normals, s - s[0])

    def to_json(self):
        return {"type": "half_plane", "normal": self.normal.tolist(), "offset": self.offset}


class Disc(Domain):
    kind = "disc"
    convex = True

    def __init__(self, center=(0.0, 0.0), radius: float = 1.0):
        self.center = as_point(center, 2)
        if not float(radius) > 0:
            raise SpecError("disc radius must be positive")
        self.radius = float(radius)

    def contains_many(self, pts):
        return self.radius - np.linalg.norm(pts - self.center, axis=1) > TIE_TOL

    def distance_many(self, pts):
        return np.abs(self.radius - np.linalg.norm(pts - self.center, axis=1))

    def bbox(self):
        return self.center - self.radius, self.center + self.radius

    def kernel_spec(self):
        return kernels.DISC, np.array([[self.center[0], self.center[1], self.radius]])

    def sample_boundary(self, m):
        if m < 3:
            raise ValueError("need m >= 3 boundary samples")
        theta = 2.0 * np.pi * np.arange(m) / m
        radial = np.column_stack([np.cos(theta), np.sin(theta)])
        return BoundaryPatch(self.center + self.radius * radial, -radial, self.radius * theta)

    def to_json(self):
        return {"type": "disc", "center": self.center.tolist(), "radius": self.radius}


class Interval(Domain):
    kind = "interval"
    dim = 1
    convex = True

    def __init__(self, a: float = 0.0, b: float = 1.0):
        a = float(a)
        b = math.inf if b is None else float(b)
        if not a < b or math.isinf(a):
            raise SpecError("interval requires finite a < b")
        self.a, self.b = a, b
        self.bounded = not math.isinf(b)

    def contains_many(self, pts):
        x = pts[:, 0]
        return np.minimum(x - self.a, self.b - x) > TIE_TOL

    def distance_many(self, pts):
        x = pts[:, 0]
        return np.abs(np.minimum(x - self.a, self.b - x))

    def bbox(self):
        if not self.bounded:
            return None
        return np.array([self.a]), np.array([self.b])

    def sample_boundary(self, m=2):
        if self.bounded:
            return BoundaryPatch(np.array([[self.a], [self.b]]), np.array([[1.0], [-1.0]]),
                                 np.array([0.0, 0.0]))
        return BoundaryPatch(np.array([[self.a]]), np.array([[1.0]]), np.array([0.0]))

    def to_json(self):
        return {"type": "interval", "a": self.a, "b": None if not self.bounded else self.b}


class _Polyline:
    """Closed polyline with nearest-segment queries."""

    def __init__(self, vertices: np.ndarray):
        self.v = np.ascontiguousarray(vertices, dtype=float)
        self.a = self.v
        self.b = np.ascontiguousarray(np.roll(self.v, -1, axis=0))
        edges = self.b - self.a
        self.lengths = np.linalg.norm(edges, axis=1)
        if np.any(self.lengths == 0):
            raise SpecError("polyline has repeated consecutive vertices")
        self.tangents = edges / self.lengths[:, None]
        # inner normal of a positively oriented curve: tangent rotated by +90 degrees
        self.normals = np.column_stack([-self.tangents[:, 1], self.tangents[:, 0]])
        self.cumlen = np.concatenate([[0.0], np.cumsum(self.lengths)])

    @property
    def n(self):
        return len(self.v)

    @cached_property
    def thickness(self):
        """Per block of ``NEAREST_BLOCK`` segments, the largest vertex offset from the block chord."""
        n = self.n
        starts = np.arange(0, n, NEAREST_BLOCK)
        ends = np.minimum(starts + NEAREST_BLOCK, n)
        out = np.empty(len(starts))
        for k, (j0, j1) in enumerate(zip(starts, ends)):
            verts = self.v[np.arange(j0, j1 + 1) % n]
            out[k] = float(np.max(kernels.segment_distances(
                verts, self.v[j0:j0 + 1], self.v[j1 % n:j1 % n + 1])))
        return out

    def nearest(self, pts: np.ndarray):
        """Nearest boundary point: ``(distance, segment index, parameter in [0, 1])``."""
        pts = np.ascontiguousarray(pts, dtype=float).reshape(-1, 2)
        return kernels.polyline_nearest(pts, self.v, NEAREST_BLOCK, self.thickness)

    def signed_offsets(self, pts):
        """Distance with the sign of the offset along the (pseudo-)normal; positive inside."""
        dist, seg, t = self.nearest(pts)
        normal = self.normals[seg].copy()
        at_start = t <= 0.0
        at_end = t >= 1.0
        normal[at_start] += self.normals[(seg[at_start] - 1) % self.n]
        normal[at_end] += self.normals[(seg[at_end] + 1) % self.n]
        foot = self.a[seg] + t[:, None] * (self.b[seg] - self.a[seg])
        side = np.einsum("ij,ij->i", pts - foot, normal)
        return np.where(side >= 0.0, dist, -dist)

    def winding(self, pts):
        return kernels.winding_numbers(np.ascontiguousarray(pts, dtype=float), self.v)

    def point_at(self, s):
        """Points and inner normals at arc-length positions ``s``."""
        s = np.mod(s, self.cumlen[-1])
        seg = np.clip(np.searchsorted(self.cumlen, s, side="right") - 1, 0, self.n - 1)
        t = (s - self.cumlen[seg]) / self.lengths[seg]
        return self.a[seg] + t[:, None] * (self.b[seg] - self.a[seg]), self.normals[seg], seg, t

    def min_curvature_radius(self) -> float:
        prev = np.roll(self.tangents, 1, axis=0)
        turn = np.abs(np.arctan2(prev[:, 0] * self.tangents[:, 1] - prev[:, 1] * self.tangents[:, 0],
                                 np.einsum("ij,ij->i", prev, self.tangents)))
        avg = 0.5 * (self.lengths + np.roll(self.lengths, 1))
        curv = turn / avg
        top = float(np.max(curv))
        return math.inf if top == 0 else 1.0 / top


def _orient_ccw(v: np.ndarray) -> np.ndarray:
    x, y = v[:, 0], v[:, 1]
    area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    if area2 == 0:
        raise SpecError("degenerate polygon")
    return v if area2 > 0 else v[::-1].copy()


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


class Polygon(Domain):
    kind = "polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise SpecError("polygon needs at least 3 planar vertices")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        self.vertices = _orient_ccw(v)
        self._check_simple()
        self.poly = _Polyline(self.vertices)
        self.convex = self._is_convex()

    def _check_simple(self):
        v = self.vertices
        n = len(v)
        if n > 200:
            return  # O(n^2) check skipped for dense polylines
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise SpecError("polygon boundary is not simple")

    def _is_convex(self) -> bool:
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        return bool(np.all(cross >= 0))

    def contains(self, p) -> bool:
        p = as_point(p, 2)
        if self.poly.winding(p[None, :])[0] == 0:
            return False
        return float(self.distance_many(p[None, :])[0]) > TIE_TOL

    def contains_many(self, pts):
        pts = np.ascontiguousarray(pts, dtype=float)
        inside = self.poly.winding(pts) != 0
        return inside & (self.distance_many(pts) > TIE_TOL)

    def distance_many(self, pts):
        return kernels.segment_distances(np.ascontiguousarray(pts, dtype=float), self.poly.a, self.poly.b)

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def kernel_spec(self):
        if not self.convex or type(self) is not Polygon:
            return None
        # inner edge normals of the ccw boundary; d = min over edge lines
        n = self.poly.normals
        return kernels.LINES, np.column_stack([n, np.einsum("ij,ij->i", n, self.poly.a)])

    def nearest_points(self, pts):
        _, seg, t = self.poly.nearest(np.asarray(pts, dtype=float))
        return self.poly.a[seg] + t[:, None] * (self.poly.b[seg] - self.poly.a[seg])

    def sample_boundary(self, m):
        """Samples at arc-length positions ``k P / m``; those landing on a vertex are skipped."""
        if m < 3:
            raise ValueError("need m >= 3 boundary samples")
        total = self.poly.cumlen[-1]
        s = total * np.arange(m) / m
        pts, normals, seg, t = self.poly.point_at(s)
        scale = 1e-9 * total
        on_vertex = (np.abs(s[:, None] - self.poly.cumlen[None, :]) < scale).any(axis=1)
        keep = ~on_vertex
        return BoundaryPatch(pts[keep], normals[keep], s[keep])

    def to_json(self):
        return {"type": "polygon", "vertices": self.vertices.tolist()}


class BoundaryCurve(Polygon):
    """Domain bounded by a dense closed polyline approximating a smooth curve.

    Vertices are treated as samples of a smooth curve, so boundary sampling
    keeps them, and bulk membership uses the pseudo-normal sign test.
    """

    kind = "boundary_curve"

    def __init__(self, points):
        super().__init__(points)

    def contains_many(self, pts):
        pts = np.ascontiguousarray(pts, dtype=float)
        return self.poly.signed_offsets(pts) > TIE_TOL

    def distance_many(self, pts):
        return self.poly.nearest(np.asarray(pts, dtype=float))[0]

    def sample_boundary(self, m):
        if m < 3:
            raise ValueError("need m >= 3 boundary samples")
        s = self.poly.cumlen[-1] * np.arange(m) / m
        pts, normals, _, _ = self.poly.point_at(s)
        return BoundaryPatch(pts, normals, s)

    def to_json(self):
        return {"type": "boundary_curve", "points": self.vertices.tolist()}


class MappedDisc(Domain):
    """Image of the unit disc under a registered univalent map.

    Maps with a known exact image (``identity``, ``cayley``) delegate every
    geometric query to it. Otherwise the boundary is a cached polyline of
    ``phi(exp(i theta))`` with ``2**16`` vertices; each distance query takes
    the nearest polyline point and applies one Gauss-Newton step in theta
    on the exact boundary curve.
    """

    kind = "mapped_disc"

    def __init__(self, map_id: str, n_boundary: int = MAPPED_DISC_POINTS):
        try:
            self.map = conformal.get_map(map_id)
        except KeyError as exc:
            raise SpecError(str(exc)) from None
        self.map_id = map_id
        self.n_boundary = n_boundary
        self._exact = from_json(self.map.image_spec) if self.map.image_spec else None
        if self._exact is not None:
            self.convex = self._exact.convex
            self.bounded = self._exact.bounded
        else:
            theta = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
            zb = self.map(np.exp(1j * theta))
            self.theta = theta
            self.poly = _Polyline(np.column_stack([zb.real, zb.imag]))
            if not np.all(np.isfinite(self.poly.v)):
                raise GeometryError("boundary discretization failed")
            self.convex = False

    @property
    def exact(self):
        return self._exact

    def contains(self, p) -> bool:
        if self._exact is not None:
            return self._exact.contains(p)
        p = as_point(p, 2)
        if self.poly.winding(p[None, :])[0] == 0:
            return False
        return float(self.distance_many(p[None, :])[0]) > TIE_TOL

    def contains_many(self, pts):
        if self._exact is not None:
            return self._exact.contains_many(pts)
        return self.poly.signed_offsets(np.asarray(pts, dtype=float)) > TIE_TOL

    def distance_many(self, pts):
        if self._exact is not None:
            return self._exact.distance_many(pts)
        pts = np.asarray(pts, dtype=float)
        dist, seg, t = self.poly.nearest(pts)
        th0 = self.theta[seg] + t * (2.0 * np.pi / self.n_boundary)
        target = pts[:, 0] + 1j * pts[:, 1]
        best = np.abs(self.map(np.exp(1j * th0)) - target)
        regular = np.abs(np.angle(np.exp(1j * th0))) > 1e-9
        zeta = np.exp(1j * th0[regular])
        f = self.map(zeta)
        df = 1j * zeta * self.map.derivative(zeta)
        g = np.real(np.conj(f - target[regular]) * df)
        th1 = th0[regular] - g / np.abs(df) ** 2
        stepped = np.abs(self.map(np.exp(1j * th1)) - target[regular])
        best[regular] = np.minimum(best[regular], stepped)
        return best

    def distance_error_bound(self) -> float:
        """``max chord**2 / (8 * min curvature radius)`` of the cached polyline."""
        if self._exact is not None:
            return 0.0
        return float(np.max(self.poly.lengths) ** 2 / (8.0 * self.poly.min_curvature_radius()))

    def bbox(self):
        if self._exact is not None:
            return self._exact.bbox()
        return self.poly.v.min(axis=0), self.poly.v.max(axis=0)

    def kernel_spec(self):
        return self._exact.kernel_spec() if self._exact is not None else None

    def nearest_points(self, pts):
        if self._exact is not None:
            return self._exact.nearest_points(pts)
        _, seg, t = self.poly.nearest(np.asarray(pts, dtype=float))
        return self.poly.a[seg] + t[:, None] * (self.poly.b[seg] - self.poly.a[seg])

    def sample_boundary(self, m):
        """Samples equidistributed in arc length, normals ``-zeta phi'(zeta) / |phi'(zeta)|``."""
        if m < 3:
            raise ValueError("need m >= 3 boundary samples")
        if self._exact is not None and self.map_id == "identity":
            return self._exact.sample_boundary(m)
        if self._exact is not None:
            raise GeometryError(f"{self.map_id} image is unbounded; sample its exact domain instead")
        total = self.poly.cumlen[-1]
        s = total * (np.arange(m) + 0.5) / m
        _, _, seg, t = self.poly.point_at(s)
        theta = self.theta[seg] + t * (2.0 * np.pi / self.n_boundary)
        zeta = np.exp(1j * theta)
        z = self.map(zeta)
        n = -zeta * self.map.derivative(zeta)
        n = n / np.abs(n)
        return BoundaryPatch(np.column_stack([z.real, z.imag]), np.column_stack([n.real, n.imag]), s)

    def to_json(self):
        return {"type": "mapped_disc", "map": self.map_id}


def from_json(spec: dict) -> Domain:
    """Build a domain from its JSON description."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("domain spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "disc":
            return Disc(spec.get("center", [0, 0]), spec.get("radius", 1))
        if kind == "half_plane":
            return HalfPlane(spec.get("normal", [1, 0]), spec.get("offset", 0))
        if kind == "interval":
            return Interval(spec["a"], spec.get("b"))
        if kind == "polygon":
            return Polygon(spec["vertices"])
        if kind == "mapped_disc":
            return MappedDisc(spec["map"])
        if kind == "boundary_curve":
            return BoundaryCurve(spec["points"])
    except (KeyError, TypeError, DimensionError) as exc:
        raise SpecError(f"invalid {kind} spec: {exc}") from None
    raise SpecError(f"unknown domain type {kind!r}")


def unit_square() -> Polygon:
    return Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def contains(d: Domain, p) -> bool:
    return d.contains(p)


def boundary_distance(d: Domain, p) -> float:
    return d.boundary_distance(p)


def sample_boundary(d: Domain, m: int) -> BoundaryPatch:
    return d.sample_boundary(m)


def normal_modulus(patch: BoundaryPatch, t: float) -> float:
    """Empirical ``sup |n_x - n_y|`` over sampled pairs with ``|x - y| < t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    if len(patch) < 2:
        return 0.0
    tree = cKDTree(patch.points)
    pairs = tree.query_pairs(t, output_type="ndarray")
    if len(pairs) == 0:
        return 0.0
    i, j = pairs[:, 0], pairs[:, 1]
    close = np.linalg.norm(patch.points[i] - patch.points[j], axis=1) < t
    if not np.any(close):
        return 0.0
    jumps = np.linalg.norm(patch.normals[i[close]] - patch.normals[j[close]], axis=1)
    return float(np.max(jumps))


def modulus_table(patch: BoundaryPatch, ts) -> DiniModulus:
    ts = np.sort(np.asarray(ts, dtype=float))[::-1]
    return DiniModulus(ts, np.array([normal_modulus(patch, t) for t in ts]))


def dini_integral(mod: DiniModulus, t0: float = 1.0) -> float:
    """Trapezoidal estimate of the integral of ``omega(t)/t`` over the table up to ``t0``."""
    if len(mod.t) == 0:
        raise ValueError("empty modulus table")
    if not 0 < t0 <= 1:
        raise ValueError("t0 must lie in (0, 1]")
    order = np.argsort(mod.t)
    t = mod.t[order]
    w = mod.omega[order]
    keep = t <= t0
    t, w = t[keep], w[keep]
    if len(t) < 2:
        return 0.0
    return float(np.trapezoid(w / t, t))


def dini_diagnostic(mod: DiniModulus, t0: float = 1.0, ratio_threshold: float = 0.7) -> dict:
    """Partial integrals from successive decade cut-offs toward ``t = 0``.

    Flags ``possibly_non_dini`` when the per-decade increments of the last
    decades do not shrink at least geometrically (ratio below
    ``ratio_threshold``); a heuristic, since finiteness is not decidable from
    samples.
    """
    t_min = float(np.min(mod.t))
    cuts = [t0]
    while cuts[-1] / 10.0 >= t_min * (1 - 1e-12):
        cuts.append(cuts[-1] / 10.0)
    order = np.argsort(mod.t)
    t, w = mod.t[order], mod.omega[order]
    partial = []
    for c in cuts:
        keep = (t >= c * (1 - 1e-12)) & (t <= t0)
        partial.append(float(np.trapezoid(w[keep] / t[keep], t[keep])) if keep.sum() > 1 else 0.0)
    inc = np.diff(partial)
    flag = False
    if len(inc) >= 3:
        tail = inc[-3:]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = tail[1:] / tail[:-1]
        flag = bool(np.all(tail > 1e-14) and np.all(ratios > ratio_threshold))
    return {"cutoffs": cuts, "partial": partial, "increments": inc.tolist(), "possibly_non_dini": flag}
