"""Multi-color balance adjustment for color constancy.

Builds per-target chromatic adaptation matrices and blends them per
pixel with inverse chromaticity-distance weights, so chosen target
colors are corrected exactly while everything else follows its nearest
targets. Conventional white balancing (XYZ scaling, von Kries,
Bradford) and a least-squares single-matrix baseline share the same
machinery, and an evaluation harness scores methods by reproduction
angular error per chart patch.

The per-pixel kernel has a compiled backend (``ncolor._ncbext``) with a
vectorized numpy fallback; ``ncolor.KERNEL_BACKEND`` names the one in
use.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .balancing import (
    ColorCorrespondence,
    NcbCorrector,
    WbCorrector,
    WeightVector,
    apply_ncb,
    build_cheng,
    build_ncb,
    build_wb,
    chroma_distance,
    compute_weights,
    compute_weights_many,
)
from .chart_data import (
    ChartMeasurement,
    parse_measurements,
    reference_chart,
    select_ground_truth,
    serialize_measurements,
    synthesize_chart,
)
from .color_core import (
    ADAPTATION_MODELS,
    BRADFORD,
    D65_WHITE,
    VON_KRIES,
    XYZ_SCALING,
    AdaptationModel,
    apply_matrix,
    get_model,
    mat3_invert,
    srgb_to_xyz,
    to_cone_response,
    xyz_to_srgb,
)
from .evaluation import (
    PatchErrorRecord,
    PatchReport,
    aggregate,
    angular_error,
    evaluate_chart,
)
from .imaging import RasterImage, correct_image, read_ppm, write_ppm

__version__ = "0.1.0"

__all__ = [
    "ADAPTATION_MODELS",
    "AdaptationModel",
    "BRADFORD",
    "ChartMeasurement",
    "ColorCorrespondence",
    "D65_WHITE",
    "KERNEL_BACKEND",
    "NcbCorrector",
    "PatchErrorRecord",
    "PatchReport",
    "RasterImage",
    "VON_KRIES",
    "WbCorrector",
    "WeightVector",
    "XYZ_SCALING",
    "aggregate",
    "angular_error",
    "apply_matrix",
    "apply_ncb",
    "build_cheng",
    "build_ncb",
    "build_wb",
    "chroma_distance",
    "compute_weights",
    "compute_weights_many",
    "correct_image",
    "evaluate_chart",
    "get_model",
    "mat3_invert",
    "parse_measurements",
    "read_ppm",
    "reference_chart",
    "select_ground_truth",
    "serialize_measurements",
    "srgb_to_xyz",
    "synthesize_chart",
    "to_cone_response",
    "write_ppm",
    "xyz_to_srgb",
]
