"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available. Set NCOLOR_FORCE_BACKEND=numpy (or =ext)
to pin a backend, e.g. for the benchmark or for debugging.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernel_numpy

try:
    from . import _ncbext
except ImportError:
    _ncbext = None

_forced = os.environ.get("NCOLOR_FORCE_BACKEND", "").strip().lower()
if _forced not in ("", "ext", "numpy"):
    raise ImportError(
        f"NCOLOR_FORCE_BACKEND must be 'ext' or 'numpy', got {_forced!r}"
    )
if _forced == "ext" and _ncbext is None:
    raise ImportError("NCOLOR_FORCE_BACKEND=ext but the compiled kernel did not build")

BACKEND = "ext" if (_ncbext is not None and _forced != "numpy") else "numpy"


def available_backends() -> dict:
    """Name -> raw kernel callable, for benchmarks and equivalence tests."""
    backends = {"numpy": _kernel_numpy.ncb_apply}
    if _ncbext is not None:
        backends["ext"] = _ncbext.ncb_apply
    return backends


def ncb_apply(pixels, targets, matrices, y_eps: float) -> np.ndarray:
    """Apply the per-pixel weighted-blend correction to an (N, 3) buffer."""
    pixels = np.ascontiguousarray(pixels, dtype=np.float64)
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    matrices = np.ascontiguousarray(matrices, dtype=np.float64)
    if BACKEND == "ext":
        return _ncbext.ncb_apply(pixels, targets, matrices, y_eps)
    return _kernel_numpy.ncb_apply(pixels, targets, matrices, y_eps)
