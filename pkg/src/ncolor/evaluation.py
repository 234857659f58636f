"""Reproduction angular error and per-patch comparison statistics.

The metric is the angle between an adjusted color vector and its ground
truth, reported in degrees; it is invariant to positive scaling of
either vector. Reports collect per-patch mean / standard deviation over
a batch of images plus a pooled total average.

Conventions (also stamped into report headers): standard deviation is
the population form (divide by N), and the total average pools all
(image, patch) errors rather than averaging per-patch means.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .color_core import as_xyz
from .errors import EmptyInput, LengthMismatch, ZeroVector

NORM_EPSILON = 1e-12


class PatchErrorRecord(NamedTuple):
    """Angular error of one patch, in degrees."""

    patch_id: int
    error_deg: float


class PatchStats(NamedTuple):
    """Mean and standard deviation of one patch's error across images."""

    patch_id: int
    mean_deg: float
    std_deg: float


@dataclass(frozen=True)
class PatchReport:
    """Per-patch statistics for one correction method over an image batch."""

    method_name: str
    per_patch: tuple
    total_average_mean: float
    total_average_std: float
    image_count: int


def angular_error(p, q) -> float:
    """Angle between two color vectors in degrees.

    Computed as atan2(||p x q||, p . q), which is exact for parallel
    inputs and well conditioned near 0 and 180 degrees (a clamped
    arccos of the normalized dot product loses ~1e-6 deg of precision
    at small angles).
    """
    p = as_xyz(p)
    q = as_xyz(q)
    if np.linalg.norm(p) < NORM_EPSILON or np.linalg.norm(q) < NORM_EPSILON:
        raise ZeroVector("angular error is undefined for zero-length colors")
    cross = np.cross(p, q)
    return math.degrees(math.atan2(np.linalg.norm(cross), float(np.dot(p, q))))


def evaluate_chart(adjusted: Sequence, ground_truth: Sequence) -> list[PatchErrorRecord]:
    """Per-patch angular errors of an adjusted chart against its reference.

    A degenerate adjusted patch (zero vector after correction) records
    180 degrees with a warning instead of aborting the batch.
    """
    adjusted = list(adjusted)
    ground_truth = list(ground_truth)
    if len(adjusted) != len(ground_truth):
        raise LengthMismatch(
            f"{len(adjusted)} adjusted patches vs {len(ground_truth)} ground-truth patches"
        )
    records = []
    for i, (a, g) in enumerate(zip(adjusted, ground_truth), start=1):
        a = as_xyz(a)
        if np.linalg.norm(a) < NORM_EPSILON:
            warnings.warn(
                f"patch {i}: adjusted value is a zero vector; recording 180 deg",
                stacklevel=2,
            )
            records.append(PatchErrorRecord(i, 180.0))
            continue
        records.append(PatchErrorRecord(i, angular_error(a, g)))
    return records


def aggregate(reports: Sequence[Sequence[PatchErrorRecord]], method_name: str) -> PatchReport:
    """Fold per-image error records into per-patch and pooled statistics.

    Standard deviations are population (divide by N); the total average
    is the mean/std over the pooled set of all (image, patch) errors.
    """
    reports = [list(r) for r in reports]
    if not reports:
        raise EmptyInput("at least one image's records are required")
    patch_ids = [rec.patch_id for rec in reports[0]]
    for r in reports[1:]:
        if [rec.patch_id for rec in r] != patch_ids:
            raise LengthMismatch("patch ids differ between images")

    errors = np.array([[rec.error_deg for rec in r] for r in reports])  # (images, patches)
    per_patch = tuple(
        PatchStats(
            patch_id=pid,
            mean_deg=float(errors[:, j].mean()),
            std_deg=float(errors[:, j].std()),
        )
        for j, pid in enumerate(patch_ids)
    )
    pooled = errors.ravel()
    return PatchReport(
        method_name=method_name,
        per_patch=per_patch,
        total_average_mean=float(pooled.mean()),
        total_average_std=float(pooled.std()),
        image_count=len(reports),
    )


def render_comparison_table(reports: Sequence[PatchReport], notes: Sequence[str] = ()) -> str:
    """Fixed-width text table: one Mean/Std column pair per method."""
    reports = list(reports)
    if not reports:
        raise EmptyInput("no reports to render")
    width = max(15, max(len(r.method_name) for r in reports))
    lines = []
    lines.append("Reproduction angular error per patch (deg)")
    lines.append(
        "std: population (divide by N); "
        "total average: pooled over all (image, patch) errors"
    )
    for note in notes:
        lines.append(str(note))
    lines.append("")

    def cell(text: str) -> str:
        return f" {text:^{width}} "

    header = "Patch |" + "|".join(cell(r.method_name) for r in reports)
    sub = "      |" + "|".join(cell(f"{'Mean':>8} {'Std':>8}") for _ in reports)
    rule = "-" * len(header)
    lines.extend([header, sub, rule])

    for j in range(len(reports[0].per_patch)):
        pid = reports[0].per_patch[j].patch_id
        row = "|".join(
            cell(f"{r.per_patch[j].mean_deg:8.3f} {r.per_patch[j].std_deg:8.3f}")
            for r in reports
        )
        lines.append(f"{pid:5d} |" + row)
    lines.append(rule)
    totals = "|".join(
        cell(f"{r.total_average_mean:8.3f} {r.total_average_std:8.3f}")
        for r in reports
    )
    lines.append("Total |" + totals)
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[PatchReport], meta: dict | None = None) -> str:
    """Machine-readable report with every statistic at full double precision."""
    payload = {
        "std_convention": "population",
        "total_average": "pooled over all (image, patch) errors",
        "methods": [
            {
                "name": r.method_name,
                "image_count": r.image_count,
                "per_patch": [
                    {"patch": s.patch_id, "mean_deg": s.mean_deg, "std_deg": s.std_deg}
                    for s in r.per_patch
                ],
                "total_average": {
                    "mean_deg": r.total_average_mean,
                    "std_deg": r.total_average_std,
                },
            }
            for r in reports
        ],
    }
    if meta:
        payload["meta"] = meta
    return json.dumps(payload, indent=2) + "\n"
