"""Kobayashi distance and metric on simply connected planar domains.

A domain is presented as ``z = a * phi(zeta) + b`` with ``phi`` a registered
univalent map of the unit disc (see :mod:`hypmetrics.conformal`) and an
affine post-map fixed by the domain parameters. Distances are pulled back
to the disc, where ``k(0, t) = atanh t``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import conformal
from .closed_forms import poincare_disc
from .geometry import Disc, Domain, HalfPlane, MappedDisc, SpecError

NEWTON_MAX_STEPS = 64
NEWTON_ITERS = 30
ROUNDTRIP_TOL = 1e-10


class InversionError(ValueError):
    """Continuation could not pull the point back to the disc."""


class IncompatibleDomainError(ValueError):
    """No explicit uniformization is known for the domain."""


@dataclass(frozen=True)
class UniformizedDomain:
    map_id: str
    map: conformal.ConformalMap
    domain: Domain
    scale: complex = 1.0
    shift: complex = 0.0

    def forward(self, zeta):
        return self.scale * self.map(zeta) + self.shift

    def derivative(self, zeta):
        return self.scale * self.map.derivative(zeta)

    def check_univalent_sample(self, n_radii: int = 16, n_angles: int = 64) -> bool:
        """phi' is nonzero on a polar grid of the open disc."""
        r = (np.arange(n_radii) + 0.5) / n_radii
        th = 2.0 * np.pi * np.arange(n_angles) / n_angles
        zeta = (r[:, None] * np.exp(1j * th[None, :])).ravel()
        return bool(np.all(np.abs(self.derivative(zeta)) > 0.0))


def from_map(map_id: str) -> UniformizedDomain:
    m = conformal.get_map(map_id)
    return UniformizedDomain(map_id, m, MappedDisc(map_id))


def uniformize(domain: Domain) -> UniformizedDomain:
    """Explicit uniformization of a disc, a half-plane or a mapped disc."""
    if isinstance(domain, MappedDisc):
        return UniformizedDomain(domain.map_id, domain.map, domain)
    if isinstance(domain, Disc):
        c = complex(domain.center[0], domain.center[1])
        return UniformizedDomain("identity", conformal.get_map("identity"), domain, domain.radius, c)
    if isinstance(domain, HalfPlane):
        # Cayley maps onto Re > 0; rotate so the normal points along +x and shift by the offset
        n = complex(domain.normal[0], domain.normal[1])
        return UniformizedDomain("cayley", conformal.get_map("cayley"), domain, n, domain.offset * n)
    raise IncompatibleDomainError(f"no explicit uniformization for {domain.kind or type(domain).__name__}")


def _as_complex(z) -> complex:
    if isinstance(z, (complex, float, int, np.number)):
        return complex(z)
    arr = np.asarray(z, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise SpecError(f"expected a complex number or a planar point, got {z!r}")
    return complex(arr[0], arr[1])


def eval_map(u: UniformizedDomain, zeta) -> complex:
    zeta = complex(zeta)
    if abs(zeta) > 1.0:
        raise ValueError("zeta must lie in the closed unit disc")
    return complex(u.forward(zeta))


def eval_derivative(u: UniformizedDomain, zeta) -> complex:
    zeta = complex(zeta)
    if abs(zeta) > 1.0:
        raise ValueError("zeta must lie in the closed unit disc")
    return complex(u.derivative(zeta))


def _newton(u, zeta, target):
    """Newton iterates toward ``forward(zeta) = target``; None unless they converge inside the disc."""
    scale = 1.0 + abs(target)
    for _ in range(NEWTON_ITERS):
        if not abs(zeta) < 1.0:
            return None
        try:
            residual = complex(u.forward(zeta)) - target
            step = residual / complex(u.derivative(zeta))
        except (conformal.BranchPointError, ZeroDivisionError):
            return None
        if not cmath.isfinite(step):
            return None
        zeta -= step
        if abs(step) <= 1e-15 * max(1.0, abs(zeta)) or abs(residual) <= 1e-15 * scale:
            return zeta if abs(zeta) < 1.0 else None
    return None


def invert_map(u: UniformizedDomain, z) -> complex:
    """Preimage in the disc by Newton continuation along the segment ``forward(0) -> z``.

    The continuation takes at most 64 steps; a step that fails to converge is
    halved. Raises :class:`InversionError` when the point is outside the image
    or the continuation stalls near the boundary.
    """
    z = _as_complex(z)
    z0 = complex(u.forward(0.0))
    zeta, s, ds = 0.0j, 0.0, 1.0
    for _ in range(NEWTON_MAX_STEPS):
        if s >= 1.0:
            break
        s_new = min(1.0, s + ds)
        nxt = _newton(u, zeta, z0 + s_new * (z - z0))
        if nxt is None:
            ds /= 2.0
            continue
        zeta, s = nxt, s_new
        ds = min(2.0 * ds, 1.0 - s) if s < 1.0 else ds
    if s < 1.0:
        raise InversionError(f"continuation to {z} failed; point outside the image or too close to its boundary")
    if abs(complex(u.forward(zeta)) - z) > ROUNDTRIP_TOL * (1.0 + abs(z)):
        raise InversionError(f"Newton residual too large at {z}")
    return zeta


def k_dist(u: UniformizedDomain, z, w) -> float:
    """Kobayashi distance: the disc distance of the preimages."""
    z, w = _as_complex(z), _as_complex(w)
    if z == w:
        return 0.0
    return poincare_disc(invert_map(u, z), invert_map(u, w))


def kappa_metric(u: UniformizedDomain, z, X) -> float:
    """Infinitesimal Kobayashi metric ``|X| / ((1 - |zeta|^2) |dz/dzeta|)``."""
    zeta = invert_map(u, _as_complex(z))
    m = abs(zeta)
    return abs(_as_complex(X)) / ((1.0 - m) * (1.0 + m) * abs(complex(u.derivative(zeta))))


@lru_cache(maxsize=1)
def _npt_domain() -> MappedDisc:
    return MappedDisc("npt_example")


def npt_divergence(t: float) -> float:
    """``2 k(phi(t), 0) + log d(phi(t))`` for the example map, with ``2 k = 2 atanh t``."""
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise ValueError("t must lie in [0, 1)")
    d = _npt_domain()
    z = complex(d.map(t))
    return 2.0 * math.atanh(t) + math.log(d.boundary_distance((z.real, z.imag)))
