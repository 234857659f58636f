import math
import warnings

import numpy as np
import pytest

from ncolor import chart_data
from ncolor.balancing import build_wb, chroma_distance
from ncolor.chart_data import (
    ChartMeasurement,
    correspondences_from_charts,
    csv_header,
    parse_measurements,
    reference_chart,
    select_ground_truth,
    serialize_measurements,
    synthesize_chart,
    validate_target_ids,
)
from ncolor.color_core import BRADFORD, D65_WHITE, SRGB_TO_XYZ
from ncolor.errors import EmptyInput, ParseError, PatchCountError
from ncolor.evaluation import angular_error


@pytest.fixture(scope="module")
def reference():
    return reference_chart()


def make_csv(charts):
    return serialize_measurements(charts)


class TestReferenceChart:
    def test_shape_and_white_normalization(self, reference):
        assert reference.patches.shape == (24, 3)
        assert reference.patch(19)[1] == 1.0

    def test_white_patch_is_near_d65(self, reference):
        assert chroma_distance(reference.patch(19), D65_WHITE) < 0.02

    def test_neutral_ramp_descends(self, reference):
        neutral_y = [reference.patch(i)[1] for i in range(19, 25)]
        assert neutral_y == sorted(neutral_y, reverse=True)

    def test_patch_id_bounds(self, reference):
        with pytest.raises(ValueError):
            reference.patch(0)
        with pytest.raises(ValueError):
            reference.patch(25)


class TestParseMeasurements:
    def test_two_images(self, reference):
        charts = [
            synthesize_chart(reference, (0.9, 1.0, 1.1), image_id="a"),
            synthesize_chart(reference, (1.1, 1.0, 0.9), image_id="b"),
        ]
        parsed = parse_measurements(make_csv(charts))
        assert [m.image_id for m in parsed] == ["a", "b"]
        assert all(m.patches.shape == (24, 3) for m in parsed)

    def test_parse_normalizes_white_y(self, reference):
        chart = synthesize_chart(reference, (0.9, 1.2, 1.1), image_id="a")
        parsed = parse_measurements(make_csv([chart]))[0]
        assert parsed.patch(19)[1] == 1.0
        # chromaticity is untouched by the rescale
        assert chroma_distance(parsed.patch(5), chart.patch(5)) <= 1e-12

    def test_linear_rgb_white_becomes_d65(self):
        header = ",".join(csv_header())
        row = ["img0", "linear-rgb"]
        for patch in range(24):
            row.extend(["1.0", "1.0", "1.0"] if patch == 18 else ["0.25", "0.5", "0.75"])
        parsed = parse_measurements(header + "\n" + ",".join(row) + "\n")
        white = parsed[0].patch(19)
        # oracle: row sums of the linear sRGB matrix, renormalized to Y=1
        expected = SRGB_TO_XYZ.sum(axis=1)
        expected = expected / expected[1]
        assert np.abs(white - expected).max() <= 1e-12
        assert np.abs(white - [0.9505, 1.0000, 1.0890]).max() <= 1e-3

    def test_truncated_row_names_image(self, reference):
        text = make_csv([synthesize_chart(reference, (1.0, 1.0, 1.0), image_id="short")])
        lines = text.splitlines()
        lines[1] = ",".join(lines[1].split(",")[:-3])  # drop patch 24
        with pytest.raises(PatchCountError) as excinfo:
            parse_measurements("\n".join(lines) + "\n")
        assert excinfo.value.image_id == "short"
        assert excinfo.value.count == 23

    def test_wrong_header(self):
        with pytest.raises(ParseError) as excinfo:
            parse_measurements("image,space,oops\nx,y,z\n")
        assert excinfo.value.line == 1

    def test_empty_text(self):
        with pytest.raises(ParseError):
            parse_measurements("")

    def test_header_only_gives_no_measurements(self):
        assert parse_measurements(",".join(csv_header()) + "\n") == []

    def test_bad_number_reports_line(self, reference):
        text = make_csv(
            [
                synthesize_chart(reference, (1.0, 1.0, 1.0), image_id="ok"),
                synthesize_chart(reference, (1.0, 1.0, 1.0), image_id="bad"),
            ]
        )
        lines = text.splitlines()
        fields = lines[2].split(",")
        fields[4] = "not-a-number"
        lines[2] = ",".join(fields)
        with pytest.raises(ParseError) as excinfo:
            parse_measurements("\n".join(lines) + "\n")
        assert excinfo.value.line == 3

    def test_bad_space_tag(self, reference):
        text = make_csv([synthesize_chart(reference, (1.0, 1.0, 1.0), image_id="a")])
        with pytest.raises(ParseError):
            parse_measurements(text.replace("a,xyz", "a,lab"))

    def test_round_trip_is_bit_exact(self, reference):
        charts = [
            synthesize_chart(reference, (0.8, 1.0, 1.3), noise_sigma=0.005, seed=9,
                             image_id="n1"),
            synthesize_chart(reference, (1.2, 1.0, 0.7), image_id="n2"),
        ]
        once = parse_measurements(make_csv(charts))
        twice = parse_measurements(serialize_measurements(once))
        for a, b in zip(once, twice):
            assert a.image_id == b.image_id
            assert np.array_equal(a.patches, b.patches)

    def test_white_ramp_warning(self, reference):
        patches = reference.patches.copy()
        patches[18] = patches[19] * 0.5  # white dimmer than neutral 8
        text = make_csv([ChartMeasurement("odd", patches)])
        with pytest.warns(UserWarning, match="neutral ramp"):
            parse_measurements(text)


class TestSelectGroundTruth:
    def test_single_image(self, reference):
        assert select_ground_truth([reference]) == "builtin-reference"

    def test_exact_d65_white_wins(self, reference):
        patches = reference.patches.copy()
        patches[18] = D65_WHITE
        exact = ChartMeasurement("exact", patches)
        skewed = synthesize_chart(reference, (0.7, 1.0, 1.4), image_id="skewed")
        assert select_ground_truth([skewed, exact]) == "exact"

    def test_three_synthetic_scalings(self, reference):
        charts = [
            synthesize_chart(reference, (0.8, 1.0, 1.2), image_id="cool"),
            synthesize_chart(reference, (1.0, 1.0, 1.0), image_id="neutral"),
            synthesize_chart(reference, (1.2, 1.0, 0.8), image_id="warm"),
        ]
        # oracle: recompute each white's ratio distance to D65 directly
        def d65_distance(chart):
            x, y, z = chart.patch(19)
            dx = x / y - D65_WHITE[0] / D65_WHITE[1]
            dz = z / y - D65_WHITE[2] / D65_WHITE[1]
            return math.hypot(dx, dz)

        expected = min(charts, key=d65_distance).image_id
        assert expected == "neutral"
        assert select_ground_truth(charts) == "neutral"

    def test_permutation_invariant(self, reference):
        charts = [
            synthesize_chart(reference, (0.8, 1.0, 1.2), image_id="a"),
            synthesize_chart(reference, (1.05, 1.0, 0.95), image_id="b"),
            synthesize_chart(reference, (1.3, 1.0, 0.7), image_id="c"),
        ]
        ids = {select_ground_truth(perm) for perm in (charts, charts[::-1])}
        assert len(ids) == 1

    def test_tie_breaks_lexicographically(self, reference):
        a = ChartMeasurement("zz", reference.patches)
        b = ChartMeasurement("aa", reference.patches)
        assert select_ground_truth([a, b]) == "aa"

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            select_ground_truth([])


class TestSynthesizeChart:
    def test_identity_is_exact(self, reference):
        out = synthesize_chart(reference, (1.0, 1.0, 1.0), noise_sigma=0.0)
        assert np.array_equal(out.patches, reference.patches)

    def test_componentwise_gains(self, reference):
        out = synthesize_chart(reference, (2.0, 1.0, 1.0))
        assert np.array_equal(out.patches[:, 0], reference.patches[:, 0] * 2.0)
        assert np.array_equal(out.patches[:, 1:], reference.patches[:, 1:])

    def test_noise_is_seed_deterministic(self, reference):
        a = synthesize_chart(reference, (1.0, 1.0, 1.0), noise_sigma=0.01, seed=5)
        b = synthesize_chart(reference, (1.0, 1.0, 1.0), noise_sigma=0.01, seed=5)
        c = synthesize_chart(reference, (1.0, 1.0, 1.0), noise_sigma=0.01, seed=6)
        assert np.array_equal(a.patches, b.patches)
        assert not np.array_equal(a.patches, c.patches)

    def test_gains_must_be_positive(self, reference):
        with pytest.raises(ValueError):
            synthesize_chart(reference, (0.0, 1.0, 1.0))

    def test_wb_restores_white_but_not_chromatic_patches(self, reference):
        # the motivating phenomenon: a white-balanced chart still carries
        # lighting effects on non-white patches
        skewed = synthesize_chart(reference, (0.8, 1.0, 1.3))
        wb = build_wb(BRADFORD, skewed.patch(19), reference.patch(19))
        errors = [
            angular_error(wb.apply(skewed.patch(i)), reference.patch(i))
            for i in range(1, 25)
        ]
        assert errors[18] <= 1e-7  # white restored
        chromatic = errors[:18]
        assert max(chromatic) > 0.1  # at least one chromatic patch still off


class TestTargetsAndCorrespondences:
    def test_validate_target_ids(self):
        assert validate_target_ids((13, 14, 15, 19)) == (13, 14, 15, 19)
        with pytest.raises(EmptyInput):
            validate_target_ids(())
        with pytest.raises(ValueError):
            validate_target_ids((13, 13))
        with pytest.raises(ValueError):
            validate_target_ids((0,))
        with pytest.raises(ValueError):
            validate_target_ids((25,))

    def test_correspondences_pair_input_with_reference(self, reference):
        skewed = synthesize_chart(reference, (0.8, 1.0, 1.3))
        corrs = correspondences_from_charts(skewed, reference, (13, 19))
        assert len(corrs) == 2
        assert np.array_equal(corrs[0].target, skewed.patch(13))
        assert np.array_equal(corrs[0].ground_truth, reference.patch(13))
        assert np.array_equal(corrs[1].target, skewed.patch(19))


def test_no_warning_from_clean_parse(reference):
    text = serialize_measurements([reference])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_measurements(text)
