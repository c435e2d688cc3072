"""Reproducible rejection sampling of points, pairs and triples.

Draws are organized in blocks of ``BLOCK`` items; block ``b`` of a run tagged
``tag`` with seed ``seed`` uses its own ``SeedSequence([seed, tag, b])``, so the
sample does not depend on how blocks are scheduled.
"""

from __future__ import annotations

import zlib

import numpy as np

from ..geometry import Domain, GeometryError, HalfPlane, MappedDisc

BLOCK = 256
MIN_SEPARATION = 1e-6
MAX_ROUNDS = 200
HALF_PLANE_DEPTH = 2.0
HALF_PLANE_SPAN = 2.0


class SamplingError(GeometryError):
    """Rejection sampling could not fill a block."""


def tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode())


def block_rng(seed: int, tag: str, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag_id(tag), int(block)]))


def _half_plane_of(domain):
    if isinstance(domain, HalfPlane):
        return domain
    if isinstance(domain, MappedDisc) and isinstance(domain.exact, HalfPlane):
        return domain.exact
    return None


class Region:
    """Uniform proposals in a box or ball, accepted when inside the domain (and the ball)."""

    def __init__(self, domain: Domain | None, anchor=None, radius=None, d_range=None, box=None):
        self.domain = domain
        self.anchor = None if anchor is None else np.asarray(anchor, dtype=float)
        self.radius = None if radius is None else float(radius)
        self.d_range = d_range
        if self.anchor is not None:
            if not (self.radius and self.radius > 0):
                raise ValueError("anchor ball needs a positive radius")
            self.frame = None
        elif box is not None:
            self.frame = None
            self.lo, self.hi = (np.asarray(x, dtype=float) for x in box)
        elif domain is not None and domain.bbox() is not None:
            self.frame = None
            self.lo, self.hi = (np.asarray(x, dtype=float) for x in domain.bbox())
        elif (hp := _half_plane_of(domain)) is not None:
            # box in the frame (depth along the inner normal, tangential offset)
            self.frame = hp
            self.lo = np.array([0.0, -HALF_PLANE_SPAN / 2])
            self.hi = np.array([HALF_PLANE_DEPTH, HALF_PLANE_SPAN / 2])
        else:
            raise SamplingError("cannot sample an unbounded domain without an anchor or a box")

    def propose(self, rng, n):
        if self.anchor is not None:
            # uniform in the disc of the given radius
            rad = self.radius * np.sqrt(rng.random(n))
            th = 2.0 * np.pi * rng.random(n)
            return self.anchor + np.column_stack([rad * np.cos(th), rad * np.sin(th)])
        pts = self.lo + (self.hi - self.lo) * rng.random((n, 2))
        if self.frame is not None:
            nrm = self.frame.normal
            tan = np.array([-nrm[1], nrm[0]])
            foot = self.frame.offset * nrm
            pts = foot + pts[:, :1] * nrm + pts[:, 1:] * tan
        return pts

    def accept(self, pts):
        ok = np.ones(len(pts), dtype=bool)
        if self.domain is not None:
            ok &= self.domain.contains_many(pts)
            if self.d_range is not None and ok.any():
                d = np.full(len(pts), np.nan)
                d[ok] = self.domain.distance_many(pts[ok])
                ok &= (d >= self.d_range[0]) & (d <= self.d_range[1])
        return ok


def _fill_block(region, rng, m, arity):
    """``arity`` arrays of ``m`` accepted points with pairwise separation above the minimum."""
    out = [[] for _ in range(arity)]
    have = 0
    for _ in range(MAX_ROUNDS):
        need = m - have
        batch = max(2 * need, 16)
        cand = [region.propose(rng, batch) for _ in range(arity)]
        ok = np.ones(batch, dtype=bool)
        for c in cand:
            ok &= region.accept(c)
        for i in range(arity):
            for j in range(i + 1, arity):
                ok &= np.linalg.norm(cand[i] - cand[j], axis=1) > MIN_SEPARATION
        idx = np.nonzero(ok)[0][:need]
        for i in range(arity):
            out[i].append(cand[i][idx])
        have += len(idx)
        if have == m:
            return [np.vstack(o) for o in out]
    raise SamplingError("insufficient in-region samples; acceptance rate too low")


def sample_tuples(region: Region, n: int, seed: int, tag: str, arity: int = 2):
    """``arity`` arrays of shape ``(n, 2)``; item ``k`` of each is one tuple."""
    if n < 1:
        raise ValueError("need at least one sample")
    parts = []
    for b in range(-(-n // BLOCK)):
        # whole blocks are always drawn, so item k does not depend on n
        parts.append(_fill_block(region, block_rng(seed, tag, b), BLOCK, arity))
    return [np.vstack([p[i] for p in parts])[:n] for i in range(arity)]


def sample_pairs(region, n, seed, tag):
    return tuple(sample_tuples(region, n, seed, tag, 2))


def sample_triples(region, n, seed, tag):
    return tuple(sample_tuples(region, n, seed, tag, 3))


def sample_points(region, n, seed, tag):
    return sample_tuples(region, n, seed, tag, 1)[0]
