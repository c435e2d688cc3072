"""Algebraic core of the sharp-constant argument.

``g(gamma, delta, c2) = (c2 + gamma)(c2 + delta)(2 c2 + 1 + gamma + delta) / (2 c2 - 1 + gamma + delta)``
and the one-dimensional min-max problem whose value is ``c0 = 1 + sqrt(2)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GArgs:
    gamma: float
    delta: float
    c2: float

    def __post_init__(self):
        if self.gamma < 0 or self.delta < 0:
            raise ValueError("gamma and delta must be nonnegative")
        if not self.c2 > 0.5:
            raise ValueError("c2 must exceed 1/2")


def g_value(gamma, delta=None, c2=None):
    """The rational function g; accepts a :class:`GArgs` or broadcastable arrays."""
    if isinstance(gamma, GArgs):
        gamma, delta, c2 = gamma.gamma, gamma.delta, gamma.c2
    gamma, delta, c2 = (np.asarray(x, dtype=float) for x in (gamma, delta, c2))
    den = 2.0 * c2 - 1.0 + gamma + delta
    if np.any(den <= 0):
        raise ValueError("denominator 2 c2 - 1 + gamma + delta must be positive")
    out = (c2 + gamma) * (c2 + delta) * (2.0 * c2 + 1.0 + gamma + delta) / den
    return float(out) if out.ndim == 0 else out


def g_identity_residual(gamma, c2):
    """``g(gamma, gamma + 1, c2) - (gamma + c2 + 1)**2``."""
    gamma = np.asarray(gamma, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    out = g_value(gamma, gamma + 1.0, c2) - (gamma + c2 + 1.0) ** 2
    return float(out) if np.ndim(out) == 0 else out


def g_difference_rhs(gamma, delta, c2):
    """Closed form of ``g(gamma, gamma + 1, c2) - g(gamma, delta, c2)``."""
    gamma, delta, c2 = (np.asarray(x, dtype=float) for x in (gamma, delta, c2))
    return (gamma + 1.0 - delta) / (2.0 * c2 - 1.0 + gamma + delta) \
        * (2.0 * c2 ** 2 - 1.0 + 3.0 * c2 * gamma + c2 * delta + gamma ** 2 + gamma * delta)


def g_difference_residual(gamma, delta, c2):
    lhs = g_value(gamma, np.asarray(gamma, dtype=float) + 1.0, c2) - g_value(gamma, delta, c2)
    out = lhs - g_difference_rhs(gamma, delta, c2)
    return float(out) if np.ndim(out) == 0 else out


def branch_values(c2: float) -> tuple[float, float]:
    """The two branches ``c2 sqrt((2 c2 + 1)/(2 c2 - 1))`` and ``c2 + 1``."""
    return c2 * math.sqrt((2.0 * c2 + 1.0) / (2.0 * c2 - 1.0)), c2 + 1.0


def _envelope(c2: float) -> float:
    return max(branch_values(c2))


def c0_solve(lo: float = 0.5, hi: float = 10.0, tol: float = 1e-13) -> tuple[float, float]:
    """Minimize the max of the two branches over ``(lo, hi]`` by golden-section search.

    The envelope is unimodal: the first branch decreases on (1/2, sqrt(3)/2]
    and the second increases, and they cross once. Returns ``(c0, argmin)``.
    """
    a = math.nextafter(lo, math.inf)
    b = hi
    if not _envelope(a) > _envelope(b) or not a < b:
        raise ValueError("bracket does not enclose the minimum")
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = _envelope(x1), _envelope(x2)
    while b - a > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = _envelope(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = _envelope(x2)
    x = 0.5 * (a + b)
    return _envelope(x), x
