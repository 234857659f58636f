"""Correction builders: white balance, n-color balance, and a least-squares baseline.

All three families share one idea: map observed target colors onto
their ground-truth counterparts with 3x3 transforms in XYZ.

* White balance uses a single pair (source white, destination white)
  and a diagonal gain in the adaptation basis.
* n-color balance builds one such matrix per (target, ground truth)
  pair and blends the matrices per input color with inverse
  chromaticity-distance weights, so every target color is corrected
  exactly while nearby colors follow the closest target.
* The least-squares baseline fits one global 3x3 matrix over all pairs
  via normal equations; targets are only corrected up to the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernel, _kernel_numpy
from .color_core import AdaptationModel, apply_matrix, as_xyz, to_cone_response
from .errors import (
    DegenerateTarget,
    DegenerateWhite,
    DuplicateTarget,
    EmptyInput,
    RankDeficient,
)

# Luminance clamp applied before forming X/Y and Z/Y chromaticity ratios.
Y_EPSILON = 1e-6

# A cone response below this fraction of the largest component cannot be
# used as a denominator of a diagonal gain.
CONE_EPSILON = 1e-9

# Targets whose chromaticity distance falls below this are duplicates.
DUPLICATE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ColorCorrespondence:
    """One (observed target, desired ground truth) color pair."""

    target: np.ndarray
    ground_truth: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "target", as_xyz(self.target).copy())
        object.__setattr__(self, "ground_truth", as_xyz(self.ground_truth).copy())
        if self.target[1] <= 0.0 or self.ground_truth[1] <= 0.0:
            raise ValueError("correspondence colors must have Y > 0")


class WeightVector(NamedTuple):
    """Distances d_m and the blend weights k_m derived from them."""

    distances: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class WbCorrector:
    """A single adaptation transform mapping source white to destination white."""

    matrix: np.ndarray
    model: AdaptationModel
    source_white: np.ndarray
    dest_white: np.ndarray

    def apply(self, color) -> np.ndarray:
        return apply_matrix(self.matrix, color)


@dataclass(frozen=True, eq=False)
class NcbCorrector:
    """Per-target adaptation matrices blended per input color.

    ``matrices[m]`` maps ``correspondences[m].target`` onto
    ``correspondences[m].ground_truth``; the blend weights come from
    compute_weights at application time.
    """

    model: AdaptationModel
    correspondences: tuple
    matrices: np.ndarray  # (n, 3, 3)
    targets: np.ndarray  # (n, 3)
    ground_truths: np.ndarray  # (n, 3)

    @property
    def n(self) -> int:
        return len(self.correspondences)

    def apply(self, color) -> np.ndarray:
        return apply_ncb(self, color)

    def apply_many(self, colors) -> np.ndarray:
        """Correct an (N, 3) buffer through the selected kernel backend."""
        return _kernel.ncb_apply(colors, self.targets, self.matrices, Y_EPSILON)


def _cone_pair(model: AdaptationModel, source, dest):
    src = to_cone_response(model, source)
    dst = to_cone_response(model, dest)
    limit = CONE_EPSILON * float(np.abs(src).max())
    degenerate = float(np.abs(src).min()) < limit or not np.all(src != 0.0)
    return src, dst, degenerate


def _compose(model: AdaptationModel, src_cone, dst_cone) -> np.ndarray:
    gains = dst_cone / src_cone
    return model.basis_inverse @ np.diag(gains) @ model.basis


def build_wb(model: AdaptationModel, source_white, dest_white) -> WbCorrector:
    """White-balance transform: basis_inverse @ diag(dest/source cones) @ basis."""
    source_white = as_xyz(source_white).copy()
    dest_white = as_xyz(dest_white).copy()
    src, dst, degenerate = _cone_pair(model, source_white, dest_white)
    if degenerate:
        raise DegenerateWhite(
            f"source white {source_white.tolist()} has a near-zero cone response "
            f"under {model.label}"
        )
    return WbCorrector(
        matrix=_compose(model, src, dst),
        model=model,
        source_white=source_white,
        dest_white=dest_white,
    )


def _coerce_correspondences(correspondences) -> list[ColorCorrespondence]:
    out = []
    for item in correspondences:
        if isinstance(item, ColorCorrespondence):
            out.append(item)
        else:
            target, ground_truth = item
            out.append(ColorCorrespondence(target, ground_truth))
    return out


def build_ncb(model: AdaptationModel, correspondences) -> NcbCorrector:
    """Build one adaptation matrix per correspondence.

    Each matrix is constructed exactly like the white-balance transform
    with the (target, ground truth) pair in place of the white pair, so
    a single white correspondence reproduces build_wb bit for bit.
    """
    corrs = _coerce_correspondences(correspondences)
    if not corrs:
        raise EmptyInput("at least one correspondence is required")

    matrices = []
    for m, corr in enumerate(corrs):
        src, dst, degenerate = _cone_pair(model, corr.target, corr.ground_truth)
        if degenerate:
            raise DegenerateTarget(
                m, f"near-zero cone response under {model.label}"
            )
        matrices.append(_compose(model, src, dst))

    for m in range(len(corrs)):
        for m2 in range(m + 1, len(corrs)):
            if chroma_distance(corrs[m].target, corrs[m2].target) < DUPLICATE_TOLERANCE:
                raise DuplicateTarget(m, m2)

    return NcbCorrector(
        model=model,
        correspondences=tuple(corrs),
        matrices=np.stack(matrices),
        targets=np.stack([c.target for c in corrs]),
        ground_truths=np.stack([c.ground_truth for c in corrs]),
    )


def chroma_distance(p, t) -> float:
    """Euclidean distance between the (X/Y, Z/Y) ratio pairs of two colors.

    Luminance-invariant; Y is clamped to Y_EPSILON so black inputs do
    not divide by zero.
    """
    p = as_xyz(p)
    t = as_xyz(t)
    py = max(p[1], Y_EPSILON)
    ty = max(t[1], Y_EPSILON)
    dx = p[0] / py - t[0] / ty
    dz = p[2] / py - t[2] / ty
    return math.sqrt(dx * dx + dz * dz)


def compute_weights(p, targets) -> WeightVector:
    """Inverse-distance blend weights of one color against each target.

    d'_m = (sum_j d_j) / d_m, k_m = d'_m / sum_j d'_j. When some d_m is
    exactly zero the weight vector is one-hot on the first such target.
    Weights always lie in [0, 1] and sum to 1.
    """
    p = as_xyz(p)
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if t.shape[0] == 0:
        raise EmptyInput("at least one target is required")

    py = max(p[1], Y_EPSILON)
    ty = np.maximum(t[:, 1], Y_EPSILON)
    dx = p[0] / py - t[:, 0] / ty
    dz = p[2] / py - t[:, 2] / ty
    d = np.sqrt(dx * dx + dz * dz)

    zero = d == 0.0
    if zero.any():
        k = np.zeros(len(d))
        k[int(zero.argmax())] = 1.0
    else:
        dprime = d.sum() / d
        k = dprime / dprime.sum()
    return WeightVector(distances=d, weights=k)


def compute_weights_many(pixels, targets) -> np.ndarray:
    """Vectorized compute_weights: one weight row per pixel, shape (N, n)."""
    pixels = np.asarray(pixels, dtype=np.float64)
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if targets.shape[0] == 0:
        raise EmptyInput("at least one target is required")
    return _kernel_numpy.blend_weights(pixels, targets, Y_EPSILON)


def apply_ncb(corrector: NcbCorrector, p) -> np.ndarray:
    """Blend the corrector's matrices for this color and apply the result."""
    p = as_xyz(p)
    k = compute_weights(p, corrector.targets).weights
    blended = np.einsum("m,mij->ij", k, corrector.matrices)
    return apply_matrix(blended, p)


def build_cheng(correspondences) -> np.ndarray:
    """Single 3x3 matrix minimizing sum_m ||M t_m - g_m||^2 (normal equations).

    Needs at least three correspondences whose targets span 3D;
    otherwise the fit is underdetermined and RankDeficient is raised.
    """
    corrs = _coerce_correspondences(correspondences)
    t = np.stack([c.target for c in corrs]) if corrs else np.empty((0, 3))
    g = np.stack([c.ground_truth for c in corrs]) if corrs else np.empty((0, 3))
    if len(corrs) < 3 or np.linalg.matrix_rank(t) < 3:
        raise RankDeficient(
            f"{len(corrs)} targets of rank "
            f"{int(np.linalg.matrix_rank(t)) if len(corrs) else 0} do not span 3D"
        )
    lhs = t.T @ t
    rhs = t.T @ g
    return np.linalg.solve(lhs, rhs).T


def cheng_objective(matrix, correspondences) -> float:
    """Sum of squared residuals ||M t_m - g_m||^2 of a candidate matrix."""
    corrs = _coerce_correspondences(correspondences)
    t = np.stack([c.target for c in corrs])
    g = np.stack([c.ground_truth for c in corrs])
    residual = t @ np.asarray(matrix, dtype=np.float64).T - g
    return float(np.sum(residual * residual))
