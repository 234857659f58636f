"""Binary PPM (P6) codec and whole-image correction.

Correction is a pure per-pixel map: decode to linear RGB, lift to XYZ,
apply the corrector, and re-encode with clamping only at the display
encoding step. The image can be split into row bands processed on a
thread pool; the merge is positional, so output bytes are identical for
any worker count.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .balancing import NcbCorrector, WbCorrector
from .color_core import apply_matrix, as_mat3, srgb_to_xyz, xyz_to_srgb
from .errors import FormatError

_MAXVALS = {255: (8, np.uint8), 65535: (16, np.uint16)}


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Display-encoded RGB raster; pixels shaped (height, width, 3)."""

    width: int
    height: int
    bit_depth: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise ValueError(f"bit depth must be 8 or 16, got {self.bit_depth}")
        expected_dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        pixels = np.asarray(self.pixels, dtype=expected_dtype)
        if pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        object.__setattr__(self, "pixels", pixels)


class _Tokenizer:
    """PPM header scanner that tracks byte offsets for error reporting."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos
        self.token_start = pos

    def _skip_space_and_comments(self) -> None:
        while self.pos < len(self.data):
            byte = self.data[self.pos : self.pos + 1]
            if byte.isspace():
                self.pos += 1
            elif byte == b"#":
                end = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if end < 0 else end + 1
            else:
                return

    def read_int(self, what: str) -> int:
        self._skip_space_and_comments()
        self.token_start = self.pos
        match = re.match(rb"\d+", self.data[self.pos :])
        if not match:
            raise FormatError(self.pos, f"expected {what}")
        token = match.group(0)
        self.pos += len(token)
        return int(token)


def read_ppm(data: bytes) -> RasterImage:
    """Decode binary PPM bytes; only maxval 255 and 65535 are accepted."""
    if data[:2] != b"P6":
        raise FormatError(0, "not a binary PPM (magic 'P6' missing)")
    if not (data[2:3].isspace() or data[2:3] == b"#"):
        raise FormatError(2, "expected whitespace after magic")
    tok = _Tokenizer(data, pos=2)
    width = tok.read_int("width")
    if width <= 0:
        raise FormatError(tok.token_start, f"width must be positive, got {width}")
    height = tok.read_int("height")
    if height <= 0:
        raise FormatError(tok.token_start, f"height must be positive, got {height}")
    maxval = tok.read_int("maxval")
    if maxval not in _MAXVALS:
        raise FormatError(tok.token_start, f"maxval must be 255 or 65535, got {maxval}")
    if tok.pos >= len(data) or not data[tok.pos : tok.pos + 1].isspace():
        raise FormatError(tok.pos, "expected single whitespace after maxval")
    tok.pos += 1

    bit_depth, dtype = _MAXVALS[maxval]
    sample_bytes = 1 if bit_depth == 8 else 2
    expected = width * height * 3 * sample_bytes
    raster = data[tok.pos : tok.pos + expected]
    if len(raster) != expected:
        raise FormatError(
            tok.pos + len(raster),
            f"raster truncated: expected {expected} bytes, got {len(raster)}",
        )
    if bit_depth == 8:
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        pixels = np.frombuffer(raster, dtype=">u2").astype(np.uint16)  # big-endian samples
    return RasterImage(
        width=width,
        height=height,
        bit_depth=bit_depth,
        pixels=pixels.reshape(height, width, 3),
    )


def write_ppm(image: RasterImage) -> bytes:
    """Encode to binary PPM; 16-bit samples are written big-endian."""
    maxval = 255 if image.bit_depth == 8 else 65535
    header = f"P6\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    if image.bit_depth == 8:
        raster = image.pixels.astype(np.uint8).tobytes()
    else:
        raster = image.pixels.astype(">u2").tobytes()
    return header + raster


def _correct_rows(xyz_rows: np.ndarray, corrector) -> np.ndarray:
    if isinstance(corrector, NcbCorrector):
        return corrector.apply_many(xyz_rows)
    matrix = corrector.matrix if isinstance(corrector, WbCorrector) else as_mat3(corrector)
    return apply_matrix(matrix, xyz_rows)


def correct_image(image: RasterImage, corrector, workers: int = 1) -> RasterImage:
    """Apply a corrector (WbCorrector, NcbCorrector, or bare 3x3 matrix) per pixel.

    ``workers`` > 1 splits the flattened pixel buffer into contiguous
    bands handled by a thread pool; results land positionally, so the
    output does not depend on the worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    flat = image.pixels.reshape(-1, 3)
    xyz = srgb_to_xyz(flat, bit_depth=image.bit_depth)

    if workers == 1 or len(flat) < 2 * workers:
        corrected = _correct_rows(xyz, corrector)
    else:
        bounds = np.linspace(0, len(flat), workers + 1, dtype=int)
        corrected = np.empty_like(xyz)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                (start, stop, pool.submit(_correct_rows, xyz[start:stop], corrector))
                for start, stop in zip(bounds[:-1], bounds[1:])
                if stop > start
            ]
            for start, stop, future in futures:
                corrected[start:stop] = future.result()

    codes = xyz_to_srgb(corrected, bit_depth=image.bit_depth)
    return RasterImage(
        width=image.width,
        height=image.height,
        bit_depth=image.bit_depth,
        pixels=codes.reshape(image.height, image.width, 3),
    )
