import json
import math

import numpy as np
import pytest

from ncolor.errors import EmptyInput, LengthMismatch, ZeroVector
from ncolor.evaluation import (
    PatchErrorRecord,
    aggregate,
    angular_error,
    evaluate_chart,
    render_comparison_table,
    reports_to_json,
)


class TestAngularError:
    def test_identical_vectors(self):
        assert angular_error((0.2, 0.5, 0.3), (0.2, 0.5, 0.3)) == 0.0

    def test_positive_scaling_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            p = rng.uniform(0.01, 2.0, 3)
            q = rng.uniform(0.01, 2.0, 3)
            c1, c2 = rng.uniform(0.1, 10.0, 2)
            assert abs(angular_error(c1 * p, c2 * q) - angular_error(p, q)) <= 1e-9

    def test_parallel_after_scaling(self):
        p = np.array([0.3, 0.8, 0.1])
        assert angular_error(p, 1.7 * p) <= 1e-9

    def test_orthogonal_axes(self):
        assert abs(angular_error((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)) - 90.0) <= 1e-9

    def test_opposite_vectors(self):
        assert abs(angular_error((1.0, 1.0, 1.0), (-1.0, -1.0, -1.0)) - 180.0) <= 1e-9

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = rng.uniform(-1.0, 1.0, 3)
            q = rng.uniform(-1.0, 1.0, 3)
            if np.linalg.norm(p) < 1e-6 or np.linalg.norm(q) < 1e-6:
                continue
            assert angular_error(p, q) == angular_error(q, p)

    def test_triangle_inequality_on_sphere(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p, q, r = rng.uniform(0.01, 1.0, (3, 3))
            assert angular_error(p, q) <= angular_error(p, r) + angular_error(r, q) + 1e-9

    def test_zero_vector_raises(self):
        with pytest.raises(ZeroVector):
            angular_error((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
        with pytest.raises(ZeroVector):
            angular_error((1.0, 0.0, 0.0), (1e-13, 1e-13, 1e-13))

    def test_agrees_with_arccos_at_moderate_angles(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            p = rng.uniform(0.05, 1.0, 3)
            q = rng.uniform(0.05, 1.0, 3)
            cos = np.dot(p, q) / (np.linalg.norm(p) * np.linalg.norm(q))
            reference = math.degrees(math.acos(min(1.0, max(-1.0, cos))))
            assert abs(angular_error(p, q) - reference) <= 1e-9


class TestEvaluateChart:
    def test_perfect_adjustment(self):
        chart = [np.array([0.2 + i / 100, 0.5, 0.4]) for i in range(24)]
        records = evaluate_chart(chart, chart)
        assert [r.patch_id for r in records] == list(range(1, 25))
        assert all(r.error_deg == 0.0 for r in records)

    def test_scaled_patch_still_zero(self):
        chart = [np.array([0.3, 0.6, 0.2]), np.array([0.5, 0.5, 0.5])]
        adjusted = [chart[0] * 2.0, chart[1]]
        records = evaluate_chart(adjusted, chart)
        assert records[0].error_deg <= 1e-9
        assert records[1].error_deg == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            evaluate_chart([np.ones(3)], [np.ones(3), np.ones(3)])

    def test_degenerate_adjusted_patch_records_180(self):
        with pytest.warns(UserWarning, match="patch 2"):
            records = evaluate_chart(
                [np.ones(3), np.zeros(3)], [np.ones(3), np.ones(3)]
            )
        assert records[1].error_deg == 180.0


class TestAggregate:
    def test_single_image(self):
        records = [[PatchErrorRecord(1, 2.5), PatchErrorRecord(2, 0.5)]]
        report = aggregate(records, "wb")
        assert report.method_name == "wb"
        assert report.per_patch[0].mean_deg == 2.5
        assert report.per_patch[0].std_deg == 0.0
        assert report.total_average_mean == 1.5
        assert report.image_count == 1

    def test_identical_images_have_zero_std(self):
        one = [PatchErrorRecord(1, 1.25), PatchErrorRecord(2, 3.5)]
        report = aggregate([one, list(one), list(one)], "x")
        assert all(s.std_deg == 0.0 for s in report.per_patch)

    def test_hand_computed_mean_and_population_std(self):
        # errors {1, 3} for one patch: mean 2, population std 1
        reports = [[PatchErrorRecord(1, 1.0)], [PatchErrorRecord(1, 3.0)]]
        out = aggregate(reports, "m")
        assert out.per_patch[0].mean_deg == 2.0
        assert out.per_patch[0].std_deg == 1.0
        assert out.total_average_mean == 2.0
        assert out.total_average_std == 1.0

    def test_total_average_pools_all_cells(self):
        a = [PatchErrorRecord(1, 1.0), PatchErrorRecord(2, 2.0)]
        b = [PatchErrorRecord(1, 3.0), PatchErrorRecord(2, 6.0)]
        out = aggregate([a, b], "m")
        pooled = np.array([1.0, 2.0, 3.0, 6.0])
        assert out.total_average_mean == pooled.mean()
        assert out.total_average_std == pooled.std()

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            aggregate([], "m")

    def test_inconsistent_patch_ids_raise(self):
        a = [PatchErrorRecord(1, 1.0)]
        b = [PatchErrorRecord(2, 1.0)]
        with pytest.raises(LengthMismatch):
            aggregate([a, b], "m")


class TestReportRendering:
    def _reports(self):
        a = [[PatchErrorRecord(1, 1.0), PatchErrorRecord(2, 2.0)]]
        return [aggregate(a, "Input"), aggregate(a, "WB-Bradford(19)")]

    def test_table_contains_methods_and_totals(self):
        text = render_comparison_table(self._reports(), notes=("images: 1",))
        assert "Input" in text and "WB-Bradford(19)" in text
        assert "Total" in text
        assert "population" in text  # std convention documented in header
        assert "images: 1" in text

    def test_json_round_trips_full_precision(self):
        reports = self._reports()
        # make an awkward float to prove full precision survives
        record = [[PatchErrorRecord(1, 1.0 / 3.0)]]
        reports.append(aggregate(record, "frac"))
        payload = json.loads(reports_to_json(reports, meta={"images": 1}))
        assert payload["meta"]["images"] == 1
        frac = [m for m in payload["methods"] if m["name"] == "frac"][0]
        assert frac["per_patch"][0]["mean_deg"] == 1.0 / 3.0
        assert frac["total_average"]["mean_deg"] == 1.0 / 3.0

    def test_empty_reports_raise(self):
        with pytest.raises(EmptyInput):
            render_comparison_table([])
