"""Univalent maps of the unit disc used as explicit uniformizations.

Registry ids: ``identity``, ``cayley`` (disc onto the right half-plane) and
``npt_example``, the map ``2z + (1 - z) log(1 - z)`` whose image is C^1 but
not Dini-smooth at the image of ``z = 1``.

``log`` is numpy's principal branch; the cut of ``log(1 - z)`` lies along
``[1, +inf)``, outside the open disc.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class BranchPointError(ValueError):
    pass


@dataclass(frozen=True)
class ConformalMap:
    map_id: str
    forward: Callable
    derivative: Callable
    # Exact description of the image, as a DomainSpec JSON dict; None means
    # the image is only known through its boundary curve.
    image_spec: dict | None = None
    # Points of the unit circle where the boundary parametrization is singular.
    singular_angles: tuple[float, ...] = ()

    def __call__(self, zeta):
        return self.forward(zeta)


def _identity(z):
    return np.asarray(z, dtype=complex) + 0.0


def _identity_prime(z):
    return np.ones_like(np.asarray(z, dtype=complex))


def _cayley(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1.0):
        raise BranchPointError("cayley map has a pole at 1")
    return (1.0 + z) / (1.0 - z)


def _cayley_prime(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1.0):
        raise BranchPointError("cayley map has a pole at 1")
    return 2.0 / (1.0 - z) ** 2


def _npt(z):
    z = np.asarray(z, dtype=complex)
    one_minus = 1.0 - z
    at_branch = one_minus == 0.0
    safe = np.where(at_branch, 1.0, one_minus)
    val = 2.0 * z + safe * np.log(safe)
    # (1 - z) log(1 - z) -> 0 at the branch point
    return np.where(at_branch, 2.0 + 0.0j, val)


def _npt_prime(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1.0):
        raise BranchPointError("derivative of npt_example is unbounded at 1")
    return 1.0 - np.log(1.0 - z)


MAPS: dict[str, ConformalMap] = {
    "identity": ConformalMap("identity", _identity, _identity_prime,
                             image_spec={"type": "disc", "center": [0, 0], "radius": 1}),
    "cayley": ConformalMap("cayley", _cayley, _cayley_prime,
                           image_spec={"type": "half_plane", "normal": [1, 0], "offset": 0},
                           singular_angles=(0.0,)),
    "npt_example": ConformalMap("npt_example", _npt, _npt_prime, singular_angles=(0.0,)),
}


def get_map(map_id: str) -> ConformalMap:
    try:
        return MAPS[map_id]
    except KeyError:
        raise KeyError(f"unknown map id {map_id!r}; known: {sorted(MAPS)}") from None
