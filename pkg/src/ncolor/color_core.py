"""Color-space conversions, 3x3 matrix algebra, and chromatic adaptation bases.

Conventions used throughout the package:

* An XYZ color is a length-3 float64 array ``(X, Y, Z)``, unit-relative
  (the reference white's Y is normalized to 1.0 at chart ingestion).
* A matrix is a 3x3 float64 array, row-major.
* A cone response is a length-3 float64 array ``(rho, gamma, beta)``:
  the color's coordinates in an adaptation basis.

Functions accept array-likes and plain sequences; they always return
numpy arrays. Color-valued functions operate on the last axis, so a
single color ``(3,)`` and an image buffer ``(N, 3)`` share one code
path.

Matrix constants follow Bruce Lindbloom's reference pages
(http://www.brucelindbloom.com) and IEC 61966-2-1 for the sRGB curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

# |det| below this fraction of max|entry|^3 counts as singular.
SINGULARITY_TOL = 1e-12

# CIE standard illuminant D65, 2-degree observer, Y normalized to 1.
D65_WHITE = np.array([0.95047, 1.00000, 1.08883])
D65_WHITE.setflags(write=False)

# Linear sRGB (D65 primaries) to XYZ and back, IEC 61966-2-1.
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
SRGB_TO_XYZ.setflags(write=False)


def as_xyz(c) -> np.ndarray:
    """Coerce to a finite float64 color array with trailing axis 3."""
    c = np.asarray(c, dtype=np.float64)
    if c.shape[-1:] != (3,):
        raise ValueError(f"expected a (..., 3) color array, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("color components must be finite")
    return c


def as_mat3(m) -> np.ndarray:
    """Coerce to a finite 3x3 float64 matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def mat3_invert(m) -> np.ndarray:
    """Invert a 3x3 matrix, rejecting near-singular inputs.

    Raises SingularMatrix when |det| <= SINGULARITY_TOL * max|entry|^3,
    i.e. when the inverse would not satisfy a 1e-12 round-trip.
    """
    m = as_mat3(m)
    scale = float(np.abs(m).max())
    det = float(np.linalg.det(m))
    floor = SINGULARITY_TOL * max(scale**3, np.finfo(np.float64).tiny)
    if abs(det) <= floor:
        raise SingularMatrix(f"|det| = {abs(det):.3e} <= tolerance {floor:.3e}")
    return np.linalg.inv(m)


def apply_matrix(m, p) -> np.ndarray:
    """Plain matrix-vector product over the trailing color axis.

    Written as explicit elementwise arithmetic so that results are
    bit-identical whether colors are processed one at a time or as a
    whole buffer.
    """
    m = as_mat3(m)
    p = np.asarray(p, dtype=np.float64)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack(
        [
            m[0, 0] * x + m[0, 1] * y + m[0, 2] * z,
            m[1, 0] * x + m[1, 1] * y + m[1, 2] * z,
            m[2, 0] * x + m[2, 1] * y + m[2, 2] * z,
        ],
        axis=-1,
    )


@dataclass(frozen=True, eq=False)
class AdaptationModel:
    """An invertible basis in which illumination change is diagonal.

    ``basis`` maps XYZ to the adaptation (cone) space; ``basis_inverse``
    is precomputed and satisfies basis @ basis_inverse = I to 1e-12.
    """

    name: str
    label: str
    basis: np.ndarray
    basis_inverse: np.ndarray


def _make_model(name: str, label: str, basis) -> AdaptationModel:
    basis = as_mat3(basis)
    inverse = mat3_invert(basis)
    basis.setflags(write=False)
    inverse.setflags(write=False)
    return AdaptationModel(name=name, label=label, basis=basis, basis_inverse=inverse)


# Identity basis: diagonal scaling directly in XYZ.
XYZ_SCALING = _make_model("xyz", "XYZ", np.eye(3))

# von Kries: Hunt-Pointer-Estevez cone fundamentals normalized to D65.
VON_KRIES = _make_model(
    "vonkries",
    "VonKries",
    [
        [0.4002400, 0.7076000, -0.0808100],
        [-0.2263000, 1.1653200, 0.0457000],
        [0.0000000, 0.0000000, 0.9182200],
    ],
)

# Bradford cone response matrix.
BRADFORD = _make_model(
    "bradford",
    "Bradford",
    [
        [0.8951, 0.2664, -0.1614],
        [-0.7502, 1.7135, 0.0367],
        [0.0389, -0.0685, 1.0296],
    ],
)

ADAPTATION_MODELS = {m.name: m for m in (XYZ_SCALING, VON_KRIES, BRADFORD)}


def get_model(name: str) -> AdaptationModel:
    """Look up an adaptation model by its CLI name (xyz, vonkries, bradford)."""
    try:
        return ADAPTATION_MODELS[name]
    except KeyError:
        known = ", ".join(sorted(ADAPTATION_MODELS))
        raise ValueError(f"unknown adaptation model {name!r} (known: {known})") from None


def to_cone_response(model: AdaptationModel, c) -> np.ndarray:
    """Map a color into the model's adaptation basis: basis @ c."""
    return apply_matrix(model.basis, as_xyz(c))


# sRGB transfer curve (gamma), forward = encoded -> linear.


def srgb_decode(v) -> np.ndarray:
    """Decode nonlinear sRGB code values (already scaled to [0, 1])."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_encode(lin) -> np.ndarray:
    """Encode linear values in [0, 1] with the sRGB transfer curve."""
    lin = np.asarray(lin, dtype=np.float64)
    return np.where(lin <= 0.0031308, 12.92 * lin, 1.055 * lin ** (1.0 / 2.4) - 0.055)


XYZ_TO_SRGB = mat3_invert(SRGB_TO_XYZ)
XYZ_TO_SRGB.setflags(write=False)


def linear_rgb_to_xyz(rgb) -> np.ndarray:
    """Map linear (not gamma-encoded) sRGB-primary values to XYZ."""
    return apply_matrix(SRGB_TO_XYZ, rgb)


def xyz_to_linear_rgb(c) -> np.ndarray:
    """Map XYZ to linear sRGB-primary values; no gamut clamping."""
    return apply_matrix(XYZ_TO_SRGB, c)


def _maxval(bit_depth: int) -> int:
    if bit_depth not in (8, 16):
        raise ValueError(f"bit depth must be 8 or 16, got {bit_depth}")
    return (1 << bit_depth) - 1


def srgb_to_xyz(rgb, bit_depth: int = 8) -> np.ndarray:
    """Display-encoded RGB code values -> XYZ.

    ``rgb`` holds integers (or floats) in [0, 2**bit_depth - 1] on the
    trailing axis.
    """
    maxval = _maxval(bit_depth)
    v = np.asarray(rgb, dtype=np.float64) / maxval
    return linear_rgb_to_xyz(srgb_decode(v))


def xyz_to_srgb(c, bit_depth: int = 8) -> np.ndarray:
    """XYZ -> display-encoded RGB code values.

    Out-of-gamut linear values are clamped to [0, 1] before encoding;
    nothing upstream of this point clamps.
    """
    maxval = _maxval(bit_depth)
    lin = np.clip(xyz_to_linear_rgb(as_xyz(c)), 0.0, 1.0)
    codes = np.rint(srgb_encode(lin) * maxval)
    return codes.astype(np.uint8 if bit_depth == 8 else np.uint16)
