"""ColorChecker chart ingestion, reference selection, and synthesis.

Measurement CSV schema (normative, bit-exact for golden files):

    image_id,space,p1_x,p1_y,p1_z,...,p24_x,p24_y,p24_z

``space`` is ``xyz`` or ``linear-rgb``; UTF-8; ``.`` decimal separator;
one image per row. Rows tagged ``linear-rgb`` are mapped to XYZ with
the linear sRGB-primaries matrix at load. Every chart is rescaled at
ingestion so the white patch (19) has Y = 1, which keeps golden files
stable without affecting chromaticity or angular errors.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .balancing import ColorCorrespondence, chroma_distance
from .color_core import D65_WHITE, as_xyz, linear_rgb_to_xyz, srgb_to_xyz
from .errors import EmptyInput, ParseError, PatchCountError

PATCH_COUNT = 24

# Patch numbering of the standard 24-patch chart, reading order:
# row 3 starts with blue (13), green (14), red (15); row 4 starts with
# white (19) and descends the neutral ramp to black (24).
BLUE_PATCH = 13
GREEN_PATCH = 14
RED_PATCH = 15
WHITE_PATCH = 19

DEFAULT_TARGET_IDS = (BLUE_PATCH, GREEN_PATCH, RED_PATCH, WHITE_PATCH)

CSV_SPACES = ("xyz", "linear-rgb")

# Nominal 8-bit sRGB values of the classic 24-patch chart (X-Rite
# pre-2014 reference), used as the built-in reference chart.
_CLASSIC_CHART_SRGB = (
    (115, 82, 68),    # 1  dark skin
    (194, 150, 130),  # 2  light skin
    (98, 122, 157),   # 3  blue sky
    (87, 108, 67),    # 4  foliage
    (133, 128, 177),  # 5  blue flower
    (103, 189, 170),  # 6  bluish green
    (214, 126, 44),   # 7  orange
    (80, 91, 166),    # 8  purplish blue
    (193, 90, 99),    # 9  moderate red
    (94, 60, 108),    # 10 purple
    (157, 188, 64),   # 11 yellow green
    (224, 163, 46),   # 12 orange yellow
    (56, 61, 150),    # 13 blue
    (70, 148, 73),    # 14 green
    (175, 54, 60),    # 15 red
    (231, 199, 31),   # 16 yellow
    (187, 86, 149),   # 17 magenta
    (8, 133, 161),    # 18 cyan
    (243, 243, 242),  # 19 white
    (200, 200, 200),  # 20 neutral 8
    (160, 160, 160),  # 21 neutral 6.5
    (122, 122, 121),  # 22 neutral 5
    (85, 85, 85),     # 23 neutral 3.5
    (52, 52, 52),     # 24 black
)


@dataclass(frozen=True, eq=False)
class ChartMeasurement:
    """Mean patch colors of one chart image, stored in XYZ.

    ``source_space`` records the space the row declared in the file;
    patches are always converted to XYZ and white-normalized at load.
    """

    image_id: str
    patches: np.ndarray  # (24, 3)
    source_space: str = "xyz"

    def __post_init__(self):
        patches = as_xyz(self.patches)
        if patches.shape != (PATCH_COUNT, 3):
            raise ValueError(
                f"expected {PATCH_COUNT} patches, got shape {patches.shape}"
            )
        patches = patches.copy()
        patches.setflags(write=False)
        object.__setattr__(self, "patches", patches)

    def patch(self, patch_id: int) -> np.ndarray:
        """Patch color by 1-based chart id."""
        if not 1 <= patch_id <= PATCH_COUNT:
            raise ValueError(f"patch id must be in 1..{PATCH_COUNT}, got {patch_id}")
        return self.patches[patch_id - 1]


def validate_target_ids(ids) -> tuple[int, ...]:
    """Check a target-patch id selection: nonempty, distinct, in range."""
    ids = tuple(int(i) for i in ids)
    if not ids:
        raise EmptyInput("at least one target patch id is required")
    if len(set(ids)) != len(ids):
        raise ValueError(f"target patch ids must be distinct, got {ids}")
    for i in ids:
        if not 1 <= i <= PATCH_COUNT:
            raise ValueError(f"patch id {i} outside 1..{PATCH_COUNT}")
    return ids


def _normalized(patches: np.ndarray) -> np.ndarray:
    white_y = patches[WHITE_PATCH - 1, 1]
    if not white_y > 0.0:
        raise ValueError("white patch (19) must have Y > 0")
    return patches / white_y


def _check_neutral_ramp(image_id: str, patches: np.ndarray) -> None:
    neutral_y = patches[WHITE_PATCH - 1 : PATCH_COUNT, 1]
    if neutral_y.argmax() != 0:
        warnings.warn(
            f"image {image_id!r}: white patch (19) does not have the "
            "largest Y of the neutral ramp (19-24)",
            stacklevel=3,
        )


def csv_header() -> list[str]:
    header = ["image_id", "space"]
    for p in range(1, PATCH_COUNT + 1):
        header.extend([f"p{p}_x", f"p{p}_y", f"p{p}_z"])
    return header


def parse_measurements(text: str) -> list[ChartMeasurement]:
    """Parse measurement CSV text into white-normalized XYZ charts."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError(1, "missing header row")
    if rows[0] != csv_header():
        raise ParseError(1, "header does not match the measurement schema")

    measurements = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) < 2:
            raise ParseError(line_no, "row needs image_id and space fields")
        image_id, space = row[0], row[1]
        if space not in CSV_SPACES:
            raise ParseError(
                line_no, f"space must be one of {CSV_SPACES}, got {space!r}"
            )
        values = row[2:]
        if len(values) != PATCH_COUNT * 3:
            if len(values) % 3 == 0:
                raise PatchCountError(image_id, len(values) // 3, PATCH_COUNT)
            raise ParseError(
                line_no, f"expected {PATCH_COUNT * 3} patch components, got {len(values)}"
            )
        try:
            numbers = np.array([float(v) for v in values])
        except ValueError as exc:
            raise ParseError(line_no, f"non-numeric patch component: {exc}") from None
        if not np.all(np.isfinite(numbers)):
            raise ParseError(line_no, "patch components must be finite")

        patches = numbers.reshape(PATCH_COUNT, 3)
        if space == "linear-rgb":
            patches = linear_rgb_to_xyz(patches)
        try:
            patches = _normalized(patches)
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None
        _check_neutral_ramp(image_id, patches)
        measurements.append(
            ChartMeasurement(image_id=image_id, patches=patches, source_space=space)
        )
    return measurements


def serialize_measurements(measurements) -> str:
    """Inverse of parse_measurements; floats use repr so values round-trip bit-exactly."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(csv_header())
    for m in measurements:
        row = [m.image_id, "xyz"]
        row.extend(repr(float(v)) for v in m.patches.ravel())
        writer.writerow(row)
    return out.getvalue()


def load_measurements(path) -> list[ChartMeasurement]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_measurements(fh.read())


def save_measurements(path, measurements) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_measurements(measurements))


def reference_chart() -> ChartMeasurement:
    """Built-in reference chart: the classic patch set rendered under D65."""
    patches = srgb_to_xyz(np.array(_CLASSIC_CHART_SRGB, dtype=np.float64), bit_depth=8)
    return ChartMeasurement(
        image_id="builtin-reference", patches=_normalized(patches)
    )


def select_ground_truth(measurements, d65_white=D65_WHITE) -> str:
    """Image id whose white patch is chromatically closest to D65.

    Ties break toward the lexicographically smallest image id, so the
    choice is independent of input order.
    """
    measurements = list(measurements)
    if not measurements:
        raise EmptyInput("no measurements to select a ground truth from")
    d65_white = as_xyz(d65_white)
    return min(
        measurements,
        key=lambda m: (chroma_distance(m.patch(WHITE_PATCH), d65_white), m.image_id),
    ).image_id


def synthesize_chart(
    reference: ChartMeasurement,
    illuminant_gains,
    noise_sigma: float = 0.0,
    seed: int = 0,
    image_id: str | None = None,
) -> ChartMeasurement:
    """Simulate the reference chart under a diagonal-in-XYZ illuminant change.

    Each patch is multiplied componentwise by ``illuminant_gains`` and,
    when ``noise_sigma`` > 0, perturbed by seeded zero-mean Gaussian
    noise. Identity gains with zero sigma reproduce the reference
    exactly.
    """
    gains = as_xyz(illuminant_gains)
    if not np.all(gains > 0.0):
        raise ValueError(f"illuminant gains must be positive, got {gains.tolist()}")
    if noise_sigma < 0.0:
        raise ValueError("noise sigma must be >= 0")
    patches = reference.patches * gains
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        patches = patches + rng.normal(0.0, noise_sigma, size=patches.shape)
    if image_id is None:
        image_id = f"synth-{seed}"
    return ChartMeasurement(image_id=image_id, patches=patches)


def correspondences_from_charts(
    chart: ChartMeasurement, reference: ChartMeasurement, target_ids
) -> list[ColorCorrespondence]:
    """Target colors from ``chart`` paired with ground truths from ``reference``."""
    ids = validate_target_ids(target_ids)
    return [
        ColorCorrespondence(chart.patch(i), reference.patch(i)) for i in ids
    ]
