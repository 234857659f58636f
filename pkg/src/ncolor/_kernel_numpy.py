"""Vectorized numpy fallback for the per-pixel correction kernel.

Semantics are identical to the compiled kernel in ``_ncbext``: per
pixel, chromaticity distances to every target, inverse-distance weights
(one-hot on the first exact-zero distance), a weighted blend of the
per-target matrices, then the blended matrix applied to the pixel.
"""

from __future__ import annotations

import numpy as np


def blend_weights(pixels: np.ndarray, targets: np.ndarray, y_eps: float) -> np.ndarray:
    """Per-pixel blend weights, shape (N, n); rows sum to 1."""
    p = np.asarray(pixels, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)

    yp = np.maximum(p[:, 1], y_eps)
    px = p[:, 0] / yp
    pz = p[:, 2] / yp
    ty = np.maximum(t[:, 1], y_eps)
    tx = t[:, 0] / ty
    tz = t[:, 2] / ty

    dx = px[:, None] - tx[None, :]
    dz = pz[:, None] - tz[None, :]
    d = np.sqrt(dx * dx + dz * dz)  # (N, n)

    zero = d == 0.0
    hit = zero.any(axis=1)
    safe = np.where(zero, 1.0, d)
    with np.errstate(invalid="ignore"):  # 0/0 on one-hot rows, overwritten below
        dprime = d.sum(axis=1, keepdims=True) / safe
        k = dprime / dprime.sum(axis=1, keepdims=True)
    if hit.any():
        rows = np.nonzero(hit)[0]
        k[rows] = 0.0
        k[rows, zero[rows].argmax(axis=1)] = 1.0
    return k


def ncb_apply(pixels: np.ndarray, targets: np.ndarray, matrices: np.ndarray,
              y_eps: float) -> np.ndarray:
    p = np.asarray(pixels, dtype=np.float64)
    mats = np.asarray(matrices, dtype=np.float64)
    k = blend_weights(p, targets, y_eps)
    blended = np.einsum("nm,mij->nij", k, mats)  # (N, 3, 3)
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    out = np.empty_like(p)
    out[:, 0] = blended[:, 0, 0] * x + blended[:, 0, 1] * y + blended[:, 0, 2] * z
    out[:, 1] = blended[:, 1, 0] * x + blended[:, 1, 1] * y + blended[:, 1, 2] * z
    out[:, 2] = blended[:, 2, 0] * x + blended[:, 2, 1] * y + blended[:, 2, 2] * z
    return out
