"""Command-line interface.

Subcommands:

* ``wb`` / ``ncb`` / ``cheng``: correct a measurement CSV or a binary
  PPM image with the chosen method.
* ``compare``: run the full five-method comparison (white balance and
  n-color balance under XYZ scaling and Bradford, plus the
  least-squares baseline) against a reference chart and emit a per-patch
  report.
* ``synth``: generate synthetic measurement CSVs from a reference chart
  under simulated illuminants.
* ``select-gt``: print the image id whose white patch is closest to D65.

Exit codes: 0 success, 2 usage, 3 parse/empty input, 4 numeric
degeneracy, 5 I/O.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import balancing, chart_data, evaluation, imaging
from .color_core import (
    BRADFORD,
    XYZ_SCALING,
    apply_matrix,
    get_model,
    xyz_to_linear_rgb,
)
from .errors import (
    DataFormatError,
    EmptyInput,
    NumericError,
    UsageError,
)

_MODEL_CHOICES = ("xyz", "vonkries", "bradford")
_DEFAULT_TARGETS = ",".join(str(i) for i in chart_data.DEFAULT_TARGET_IDS)


def _parse_target_ids(text: str) -> tuple[int, ...]:
    try:
        ids = tuple(int(part) for part in text.split(","))
        return chart_data.validate_target_ids(ids)
    except (ValueError, EmptyInput) as exc:
        raise UsageError(f"invalid --targets {text!r}: {exc}") from None


def _load_reference(path: str | None) -> chart_data.ChartMeasurement:
    """Reference chart from a CSV (ground-truth row selected when there
    are several) or the built-in chart when no path is given."""
    if path is None:
        return chart_data.reference_chart()
    measurements = chart_data.load_measurements(path)
    if not measurements:
        raise EmptyInput(f"reference file {path} contains no measurements")
    if len(measurements) == 1:
        return measurements[0]
    gt_id = chart_data.select_ground_truth(measurements)
    return next(m for m in measurements if m.image_id == gt_id)


def _read_include_list(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _apply_include(measurements, include_path: str | None):
    if include_path is None:
        return measurements
    wanted = _read_include_list(include_path)
    have = {m.image_id for m in measurements}
    for image_id in wanted:
        if image_id not in have:
            print(f"ncolor: warning: include-list id {image_id!r} not in input",
                  file=sys.stderr)
    wanted_set = set(wanted)
    return [m for m in measurements if m.image_id in wanted_set]


def _is_ppm(path: str) -> bool:
    with open(path, "rb") as fh:
        return fh.read(2) == b"P6"


def _corrector_factory(command: str, args, reference):
    """Return build(measurement) -> per-color apply callable."""
    target_ids = _parse_target_ids(args.targets)

    if command == "wb":
        if len(target_ids) != 1:
            raise UsageError("wb takes exactly one target patch id (the white patch)")
        model = get_model(args.model)
        white = target_ids[0]

        def build(measurement):
            corrector = balancing.build_wb(
                model, measurement.patch(white), reference.patch(white)
            )
            return corrector.apply

        return build

    if command == "ncb":
        if args.n is not None and args.n != len(target_ids):
            raise UsageError(
                f"--n {args.n} conflicts with {len(target_ids)} target ids"
            )
        model = get_model(args.model)

        def build(measurement):
            corrs = chart_data.correspondences_from_charts(
                measurement, reference, target_ids
            )
            return balancing.build_ncb(model, corrs).apply

        return build

    if command == "cheng":

        def build(measurement):
            corrs = chart_data.correspondences_from_charts(
                measurement, reference, target_ids
            )
            matrix = balancing.build_cheng(corrs)
            return lambda color: apply_matrix(matrix, color)

        return build

    raise AssertionError(command)


def _image_corrector(command: str, args, measurement, reference):
    """Corrector object for whole-image correction (kernel path for ncb)."""
    target_ids = _parse_target_ids(args.targets)
    if command == "wb":
        if len(target_ids) != 1:
            raise UsageError("wb takes exactly one target patch id (the white patch)")
        return balancing.build_wb(
            get_model(args.model),
            measurement.patch(target_ids[0]),
            reference.patch(target_ids[0]),
        )
    corrs = chart_data.correspondences_from_charts(measurement, reference, target_ids)
    if command == "ncb":
        return balancing.build_ncb(get_model(args.model), corrs)
    return balancing.build_cheng(corrs)


def _cmd_correct(command: str, args) -> int:
    reference = _load_reference(args.reference)

    if _is_ppm(args.input):
        if args.patches is None:
            raise UsageError(
                f"{command} on a PPM image needs --patches <csv> with the "
                "image's measured chart row"
            )
        if args.output is None:
            raise UsageError(f"{command} on a PPM image needs --output <path>")
        rows = chart_data.load_measurements(args.patches)
        if not rows:
            raise EmptyInput(f"--patches file {args.patches} contains no measurements")
        measurement = rows[0]
        corrector = _image_corrector(command, args, measurement, reference)
        with open(args.input, "rb") as fh:
            image = imaging.read_ppm(fh.read())
        corrected = imaging.correct_image(image, corrector, workers=args.workers)
        with open(args.output, "wb") as fh:
            fh.write(imaging.write_ppm(corrected))
        return 0

    measurements = chart_data.load_measurements(args.input)
    if not measurements:
        raise EmptyInput(f"input file {args.input} contains no measurements")
    build = _corrector_factory(command, args, reference)
    corrected = []
    for m in measurements:
        apply_fn = build(m)
        patches = np.stack([apply_fn(p) for p in m.patches])
        corrected.append(chart_data.ChartMeasurement(m.image_id, patches))
    text = chart_data.serialize_measurements(corrected)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


_COMPARE_METHODS = ("input", "wb-xyz", "wb-bradford", "ncb-xyz", "ncb-bradford", "cheng")


def _compare_adjusted(measurement, reference, target_ids):
    """Adjusted 24-patch lists for every compared configuration."""
    corrs = chart_data.correspondences_from_charts(measurement, reference, target_ids)
    white = chart_data.WHITE_PATCH
    wb_pair = (measurement.patch(white), reference.patch(white))

    out = {"input": list(measurement.patches)}
    for model, key in ((XYZ_SCALING, "wb-xyz"), (BRADFORD, "wb-bradford")):
        corrector = balancing.build_wb(model, *wb_pair)
        out[key] = [corrector.apply(p) for p in measurement.patches]
    for model, key in ((XYZ_SCALING, "ncb-xyz"), (BRADFORD, "ncb-bradford")):
        corrector = balancing.build_ncb(model, corrs)
        out[key] = [corrector.apply(p) for p in measurement.patches]
    cheng = balancing.build_cheng(corrs)
    out["cheng"] = [apply_matrix(cheng, p) for p in measurement.patches]
    return out


def _method_label(key: str, target_ids) -> str:
    ids = ",".join(str(i) for i in target_ids)
    return {
        "input": "Input",
        "wb-xyz": f"WB-XYZ({chart_data.WHITE_PATCH})",
        "wb-bradford": f"WB-Bradford({chart_data.WHITE_PATCH})",
        "ncb-xyz": f"NCB-XYZ({ids})",
        "ncb-bradford": f"NCB-Bradford({ids})",
        "cheng": f"Cheng({ids})",
    }[key]


def compare_reports(measurements, reference, target_ids, eval_space="xyz"):
    """Run the comparison protocol and return one PatchReport per method."""
    if not measurements:
        raise EmptyInput("no measurements to compare")
    if eval_space not in ("xyz", "linear-rgb"):
        raise UsageError(f"eval space must be xyz or linear-rgb, got {eval_space!r}")
    ground_truth = list(reference.patches)
    if eval_space == "linear-rgb":
        ground_truth = [xyz_to_linear_rgb(g) for g in ground_truth]

    records = {key: [] for key in _COMPARE_METHODS}
    for m in measurements:
        adjusted = _compare_adjusted(m, reference, target_ids)
        for key in _COMPARE_METHODS:
            patches = adjusted[key]
            if eval_space == "linear-rgb":
                patches = [xyz_to_linear_rgb(p) for p in patches]
            records[key].append(evaluation.evaluate_chart(patches, ground_truth))

    return [
        evaluation.aggregate(records[key], _method_label(key, target_ids))
        for key in _COMPARE_METHODS
    ]


def _cmd_compare(args) -> int:
    target_ids = _parse_target_ids(args.targets)
    measurements = chart_data.load_measurements(args.input)
    measurements = _apply_include(measurements, args.include)
    if not measurements:
        raise EmptyInput(f"input file {args.input} contains no measurements")
    reference = _load_reference(args.reference)

    reports = compare_reports(measurements, reference, target_ids, args.eval_space)
    notes = (
        f"images: {len(measurements)}; reference: {reference.image_id}; "
        f"eval space: {args.eval_space}",
    )
    sys.stdout.write(evaluation.render_comparison_table(reports, notes))
    if args.output is not None:
        meta = {
            "images": len(measurements),
            "reference": reference.image_id,
            "eval_space": args.eval_space,
            "target_ids": list(target_ids),
        }
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(evaluation.reports_to_json(reports, meta))
    return 0


def _cmd_synth(args) -> int:
    reference = _load_reference(args.reference)
    charts = []
    if args.include_reference:
        charts.append(reference)
    if args.gains is not None:
        try:
            gains = tuple(float(g) for g in args.gains.split(","))
        except ValueError as exc:
            raise UsageError(f"invalid --gains {args.gains!r}: {exc}") from None
        if len(gains) != 3:
            raise UsageError("--gains needs three comma-separated values")
        charts.append(
            chart_data.synthesize_chart(
                reference, gains, args.sigma, seed=args.seed, image_id="synth-0000"
            )
        )
    else:
        if args.count < 1:
            raise UsageError("--count must be >= 1 when --gains is not given")
        rng = np.random.default_rng(args.seed)
        for i in range(args.count):
            # plausible illuminant shifts: X and Z move in opposition along a
            # warm/cool axis, with small independent jitter per channel
            warmth = rng.uniform(-1.0, 1.0)
            jitter = rng.uniform(0.97, 1.03, size=3)
            gains = np.array([1.0 + 0.25 * warmth, 1.0, 1.0 - 0.3 * warmth]) * jitter
            charts.append(
                chart_data.synthesize_chart(
                    reference,
                    gains,
                    args.sigma,
                    seed=args.seed + i,
                    image_id=f"synth-{i:04d}",
                )
            )
    text = chart_data.serialize_measurements(charts)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _cmd_select_gt(args) -> int:
    measurements = chart_data.load_measurements(args.input)
    print(chart_data.select_ground_truth(measurements))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncolor",
        description="Multi-color balance correction and evaluation for "
        "24-patch chart measurements and PPM images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_correct(name: str, help_text: str, default_targets: str, with_model=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="measurement CSV or binary PPM")
        p.add_argument("--reference", default=None,
                       help="reference chart CSV (default: built-in chart)")
        p.add_argument("--targets", default=default_targets,
                       help=f"comma-separated patch ids (default {default_targets})")
        if with_model:
            p.add_argument("--model", choices=_MODEL_CHOICES, default="bradford",
                           help="chromatic adaptation model (default bradford)")
        p.add_argument("--patches", default=None,
                       help="chart CSV describing a PPM input's measured patches")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--workers", type=int, default=1,
                       help="row-band worker threads for image correction")
        return p

    add_correct("wb", "white-balance a chart or image", str(chart_data.WHITE_PATCH))
    ncb = add_correct("ncb", "n-color balance a chart or image", _DEFAULT_TARGETS)
    ncb.add_argument("--n", type=int, default=None,
                     help="expected target count (must match --targets)")
    add_correct("cheng", "least-squares single-matrix correction",
                _DEFAULT_TARGETS, with_model=False)

    compare = sub.add_parser(
        "compare", help="evaluate all methods against a reference chart"
    )
    compare.add_argument("--input", required=True, help="measurement CSV")
    compare.add_argument("--reference", default=None,
                         help="reference chart CSV (default: built-in chart)")
    compare.add_argument("--targets", default=_DEFAULT_TARGETS,
                         help=f"target patch ids (default {_DEFAULT_TARGETS})")
    compare.add_argument("--eval-space", choices=("xyz", "linear-rgb"), default="xyz",
                         help="space in which angular errors are measured")
    compare.add_argument("--include", default=None,
                         help="file with one image_id per line to keep")
    compare.add_argument("--output", default=None,
                         help="also write the report as JSON to this path")

    synth = sub.add_parser("synth", help="generate synthetic measurement CSVs")
    synth.add_argument("--reference", default=None,
                       help="reference chart CSV (default: built-in chart)")
    synth.add_argument("--gains", default=None,
                       help="x,y,z illuminant gains for a single chart")
    synth.add_argument("--count", type=int, default=1,
                       help="number of charts under random gains (default 1)")
    synth.add_argument("--sigma", type=float, default=0.0,
                       help="Gaussian noise sigma in XYZ (default 0)")
    synth.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    synth.add_argument("--include-reference", action="store_true",
                       help="emit the unmodified reference as the first row")
    synth.add_argument("--output", default=None, help="output CSV path (default stdout)")

    select_gt = sub.add_parser(
        "select-gt", help="print the image id closest to D65 white"
    )
    select_gt.add_argument("--input", required=True, help="measurement CSV")

    return parser


def run(args: argparse.Namespace) -> int:
    if args.command in ("wb", "ncb", "cheng"):
        return _cmd_correct(args.command, args)
    if args.command == "compare":
        return _cmd_compare(args)
    if args.command == "synth":
        return _cmd_synth(args)
    if args.command == "select-gt":
        return _cmd_select_gt(args)
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except UsageError as exc:
        print(f"ncolor: usage error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"ncolor: data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"ncolor: numeric error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"ncolor: i/o error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    raise SystemExit(main())
