"""Exception hierarchy shared across the package.

Two broad families matter to callers: data/format problems (bad CSV, bad
PPM, mismatched lists) and numeric degeneracies (singular matrices,
zero denominators, rank-deficient fits). The CLI maps each family to a
distinct exit code.
"""


class NcolorError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(NcolorError):
    """Invalid command-line arguments or option combinations."""


class DataFormatError(NcolorError):
    """Malformed or structurally invalid input data."""


class ParseError(DataFormatError):
    """Unparseable measurement file content; carries a line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class PatchCountError(DataFormatError):
    """A chart row did not contain the expected number of patches."""

    def __init__(self, image_id: str, count: int, expected: int):
        super().__init__(
            f"image {image_id!r}: expected {expected} patches, got {count}"
        )
        self.image_id = image_id
        self.count = count
        self.expected = expected


class FormatError(DataFormatError):
    """Invalid image bytes; carries the byte offset of the failure."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset


class LengthMismatch(DataFormatError):
    """Two parallel sequences had different lengths."""


class EmptyInput(DataFormatError):
    """An operation that needs at least one element got none."""


class NumericError(NcolorError):
    """Numerical degeneracy that makes a result undefined."""


class SingularMatrix(NumericError):
    """Matrix determinant below the singularity tolerance."""


class DegenerateWhite(NumericError):
    """Source white has a near-zero cone response in the active basis."""


class DegenerateTarget(NumericError):
    """A target color has a near-zero cone response in the active basis."""

    def __init__(self, index: int, message: str = ""):
        detail = message or "near-zero cone response"
        super().__init__(f"target {index}: {detail}")
        self.index = index


class DuplicateTarget(NumericError):
    """Two targets share a chromaticity, making weights ill-defined."""

    def __init__(self, first: int, second: int):
        super().__init__(
            f"targets {first} and {second} have indistinguishable chromaticity"
        )
        self.first = first
        self.second = second


class RankDeficient(NumericError):
    """Fit targets do not span three dimensions."""


class ZeroVector(NumericError):
    """A direction is undefined because a vector has (near-)zero norm."""
