"""Hot kernels with backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``HYPMETRICS_PURE_PYTHON`` is set to a non-empty value,
the numpy/heapq fallback is used. :func:`set_backend` switches at runtime
(the benchmark and the cross-backend tests rely on this).
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_KERNELS = ("dijkstra", "segment_distances", "winding_numbers",
            "segment_lengths", "spec_distances", "descend", "polyline_nearest")

LINES = _pykernels.LINES
DISC = _pykernels.DISC
descend_generic = _pykernels.descend_generic

BACKEND = ""


def available() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def set_backend(name: str) -> None:
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        module = _ckernels
    elif name == "python":
        module = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    for fn in _KERNELS:
        globals()[fn] = getattr(module, fn)
    BACKEND = name


set_backend("python" if (_ckernels is None or os.environ.get("HYPMETRICS_PURE_PYTHON")) else "cython")
