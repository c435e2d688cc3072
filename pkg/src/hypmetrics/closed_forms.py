"""Closed-form distances and comparison functions.

Every evaluator works on the three scalars that determine it: the boundary
distances ``dz = d_D(z)``, ``dw = d_D(w)`` and the separation ``r = |z - w|``.
Arguments may be floats or numpy arrays; arrays broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class BoundConstants:
    """Sharp constants: ``c0 = 1 + sqrt(2)/2`` and the gap ``2 log(2 + sqrt(2))``."""

    c0: float = 1.0 + math.sqrt(2.0) / 2.0
    gap: float = 2.0 * math.log(2.0 + math.sqrt(2.0))

    def as_report(self) -> dict[str, str]:
        return {"c0": f"{self.c0:.15g}", "gap": f"{self.gap:.15g}"}


CONSTANTS = BoundConstants()


def _check_positive(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError(f"{name} must be positive, got {x}")
    return x


def _check_separation(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r >= 0)):
        raise ValueError(f"separation must be nonnegative, got {r}")
    return r


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def s_dist(dz, dw, r):
    """``2 asinh(r / (2 sqrt(dz dw)))``; the quasi-hyperbolic distance of a half-space."""
    dz = _check_positive("dz", dz)
    dw = _check_positive("dw", dw)
    r = _check_separation(r)
    return _scalar(2.0 * np.arcsinh(r / (2.0 * np.sqrt(dz * dw))))


def i_dist(dz, dw, r):
    """``2 log((dz + dw + r) / (2 sqrt(dz dw)))``, a lower bound of h_D.

    Evaluated as ``2 log1p(((sqrt(dz) - sqrt(dw))**2 + r) / (2 sqrt(dz dw)))``
    so that nearly coincident points lose no digits.
    """
    dz = _check_positive("dz", dz)
    dw = _check_positive("dw", dw)
    r = _check_separation(r)
    g = np.sqrt(dz * dw)
    excess = (np.sqrt(dz) - np.sqrt(dw)) ** 2 + r
    return _scalar(2.0 * np.log1p(excess / (2.0 * g)))


def v_dist(c, dz, dw, r):
    """``2 log(1 + c r / sqrt(dz dw))``."""
    c = _check_positive("c", c)
    dz = _check_positive("dz", dz)
    dw = _check_positive("dw", dw)
    r = _check_separation(r)
    return _scalar(2.0 * np.log1p(c * r / np.sqrt(dz * dw)))


def h_exact_halfspace(dz, dw, r):
    """Quasi-hyperbolic distance of a half-space; identical to :func:`s_dist`."""
    return s_dist(dz, dw, r)


def q_ratio(h: float, s: float, coincident: bool) -> float:
    """``h / s`` off the diagonal, 1 on it."""
    if coincident:
        return 1.0
    if not s > 0:
        raise ValueError("s must be positive for distinct points")
    return h / s


def poincare_disc(alpha: complex, beta: complex) -> float:
    """Poincare distance ``atanh|(alpha - beta) / (1 - conj(beta) alpha)|`` on the unit disc.

    Uses ``1 - x**2 = (1 - |alpha|**2)(1 - |beta|**2) / |1 - conj(beta) alpha|**2``
    to keep accuracy when both points are close to the unit circle.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    ma, mb = abs(alpha), abs(beta)
    if not (ma < 1.0 and mb < 1.0):
        raise ValueError("arguments must lie in the open unit disc")
    num = abs(alpha - beta)
    if num == 0.0:
        return 0.0
    den = abs(1.0 - beta.conjugate() * alpha)
    x = num / den
    one_minus_x2 = (1.0 - ma) * (1.0 + ma) * (1.0 - mb) * (1.0 + mb) / (den * den)
    return math.log1p(x) - 0.5 * math.log(one_minus_x2)


def k_disc_real(alpha: float, beta: float) -> float:
    """``0.5 log(1 + 2(alpha - beta) / ((1 - alpha)(1 + beta)))`` for ``-1 < beta <= alpha < 1``."""
    if not (-1.0 < beta <= alpha < 1.0):
        raise ValueError("require -1 < beta <= alpha < 1")
    return 0.5 * math.log1p(2.0 * (alpha - beta) / ((1.0 - alpha) * (1.0 + beta)))


def h_exact_interval(d, z: float, w: float) -> float:
    """Quasi-hyperbolic distance on an interval or ray; equals ``i_dist``."""
    z = float(np.reshape(np.asarray(z, dtype=float), -1)[0])
    w = float(np.reshape(np.asarray(w, dtype=float), -1)[0])
    if not (d.contains(z) and d.contains(w)):
        raise ValueError("points must lie inside the interval")
    return i_dist(d.boundary_distance(z), d.boundary_distance(w), abs(z - w))


@dataclass(frozen=True)
class LipschitzField:
    """``f(x) = min_i (b_i + |x - a_i|)``: positive and exactly 1-Lipschitz."""

    anchors: np.ndarray
    offsets: np.ndarray
    lipschitz: float = field(default=1.0)

    @classmethod
    def random(cls, rng: np.random.Generator, n_anchors: int = 8, dim: int = 2,
               spread: float = 2.0, min_offset: float = 0.05, max_offset: float = 1.0):
        anchors = rng.uniform(-spread, spread, size=(n_anchors, dim))
        offsets = rng.uniform(min_offset, max_offset, size=n_anchors)
        return cls(anchors, offsets)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        dist = np.linalg.norm(pts[:, None, :] - self.anchors[None, :, :], axis=-1)
        vals = np.min(dist + self.offsets[None, :], axis=1)
        return float(vals[0]) if single else vals

    def lipschitz_violation(self, points: np.ndarray) -> float:
        """Largest ``|f(x) - f(y)| - |x - y|`` over all sampled pairs."""
        vals = self(points)
        gaps = np.abs(vals[:, None] - vals[None, :])
        dists = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
        return float(np.max(gaps - dists))


def rho_lipschitz(f: Callable, z, w) -> float:
    """``log((f(z) + f(w) + |z - w|) / (2 sqrt(f(z) f(w))))`` for a positive 1-Lipschitz ``f``."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    fz, fw = float(f(z)), float(f(w))
    if not (fz > 0 and fw > 0):
        raise ValueError("field values must be positive")
    return 0.5 * i_dist(fz, fw, float(np.linalg.norm(z - w)))


def rho_values(fz, fw, r):
    """Vectorized ``rho`` from precomputed field values."""
    return 0.5 * i_dist(fz, fw, r)
