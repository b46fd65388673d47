import json
import subprocess
import sys

import numpy as np
import pytest

import metricforge as mf
from metricforge.cli import main


@pytest.fixture()
def three_point_file(tmp_path, three_point):
    path = tmp_path / "space.json"
    mf.save_space(three_point, path)
    return path


@pytest.fixture()
def marked_line_file(tmp_path, marked_line):
    path = tmp_path / "line.json"
    mf.save_space(marked_line, path)
    return path


class TestGenerate:
    def test_grid_file_and_manifest(self, tmp_path):
        out = tmp_path / "grid.json"
        code = main(["generate", "--kind", "grid", "--side", "33",
                     "--spacing", "0.03125", "-o", str(out)])
        assert code == 0
        space = mf.load_space(out)
        assert space.n == 1089
        manifest = json.loads((tmp_path / "grid.json.manifest.json").read_text())
        assert manifest["command"] == "generate"
        assert manifest["params"]["side"] == 33
        assert "duration_s" in manifest

    def test_sphere_cap_marks_boundary(self, tmp_path):
        out = tmp_path / "cap.json"
        code = main(["generate", "--kind", "sphere-cap", "--eps", "0.2",
                     "--n", "300", "--seed", "7", "-o", str(out)])
        assert code == 0
        assert mf.load_space(out).boundary

    def test_zero_side_is_usage_error(self, tmp_path):
        code = main(["generate", "--kind", "grid", "--side", "0",
                     "--spacing", "1.0", "-o", str(tmp_path / "x.json")])
        assert code == 2

    def test_unknown_flag_combo(self, tmp_path):
        code = main(["generate", "--kind", "grid", "-o", str(tmp_path / "x.json")])
        assert code == 2  # missing side/spacing


class TestWarpCommand:
    def test_warp_writes_expected_distance(self, tmp_path, three_point_file):
        out = tmp_path / "warped.json"
        code = main(["warp", str(three_point_file), "--basepoint", "p",
                     "-o", str(out)])
        assert code == 0
        warped = mf.load_space(out)
        assert warped.points[-1] == mf.INFINITY_LABEL
        a, b = warped.points.index("a"), warped.points.index("b")
        assert warped.dist[a, b] == pytest.approx(1 / 6, abs=1e-12)

    def test_unknown_basepoint(self, tmp_path, three_point_file):
        code = main(["warp", str(three_point_file), "--basepoint", "zz",
                     "-o", str(tmp_path / "w.json")])
        assert code == 2

    def test_missing_input(self, tmp_path):
        code = main(["warp", str(tmp_path / "nope.json"), "--basepoint", "p",
                     "-o", str(tmp_path / "w.json")])
        assert code == 2


class TestDoubleCommand:
    def test_marked_line_doubles_to_five_points(self, tmp_path, marked_line_file):
        out = tmp_path / "doubled.json"
        assert main(["double", str(marked_line_file), "-o", str(out)]) == 0
        assert mf.load_space(out).n == 5

    def test_unmarked_space_fails(self, tmp_path, three_point_file):
        code = main(["double", str(three_point_file), "-o", str(tmp_path / "d.json")])
        assert code == 2


class TestCheckCommand:
    def test_metric_suite_pass(self, tmp_path, three_point_file):
        out = tmp_path / "report.json"
        code = main(["check", str(three_point_file), "--suite", "metric",
                     "-o", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["ok"] is True

    def test_metric_suite_fail(self, tmp_path):
        bad = mf.FiniteMetricSpace(("a", "b", "c"), np.array([
            [0.0, 1.0, 9.0], [1.0, 0.0, 1.0], [9.0, 1.0, 0.0]]))
        path = tmp_path / "bad.json"
        mf.save_space(bad, path)
        assert main(["check", str(path), "--suite", "metric"]) == 1

    def test_regularity_suite_grid(self, tmp_path):
        grid_path = tmp_path / "grid.json"
        main(["generate", "--kind", "grid", "--side", "33", "--spacing",
              "0.03125", "-o", str(grid_path)])
        out = tmp_path / "reg.json"
        code = main(["check", str(grid_path), "--suite", "regularity",
                     "--q", "2", "--radii", "0.125,0.25",
                     "--claim-k", "6.2832", "-o", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["K_hat"] <= 6.2832

    def test_regularity_claim_failure_exit(self, tmp_path):
        grid_path = tmp_path / "grid.json"
        main(["generate", "--kind", "grid", "--side", "9", "--spacing",
              "0.125", "-o", str(grid_path)])
        code = main(["check", str(grid_path), "--suite", "regularity",
                     "--q", "2", "--claim-k", "1.0"])
        assert code == 1

    def test_distortion_suite_against_warp(self, tmp_path):
        src = tmp_path / "m.json"
        mf.save_space(mf.random_metric(24, seed=3), src)
        dst = tmp_path / "w.json"
        main(["warp", str(src), "--basepoint", "p0", "-o", str(dst)])
        out = tmp_path / "qm.json"
        csv_out = tmp_path / "envelope.csv"
        code = main(["check", str(src), "--suite", "distortion", "--kind", "qm",
                     "--dst", str(dst), "--claim-theta", "16t",
                     "-o", str(out), "--csv", str(csv_out)])
        assert code == 0
        assert json.loads(out.read_text())["claim"]["passed"] is True
        assert csv_out.read_text().startswith("bin_upper,envelope,count")

    def test_llc_unusable_delta_is_diagnostic(self, tmp_path):
        path = tmp_path / "disk.json"
        mf.save_space(mf.disk_sample(60, seed=1), path)
        code = main(["check", str(path), "--suite", "llc", "--delta", "0.001"])
        assert code == 3

    def test_quasicircle_suite(self, tmp_path, circle_256):
        path = tmp_path / "circle.json"
        mf.save_space(circle_256, path)
        code = main(["check", str(path), "--suite", "quasicircle",
                     "--max-lambda", "2", "--max-doubling", "8"])
        assert code == 0

    def test_reports_are_byte_identical_across_runs(self, tmp_path):
        path = tmp_path / "disk.json"
        mf.save_space(mf.disk_sample(150, seed=5), path)
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for out in (out1, out2):
            code = main(["check", str(path), "--suite", "llc",
                         "--seed", "11", "-o", str(out)])
            assert code in (0, 1)
        assert out1.read_bytes() == out2.read_bytes()


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "g.json"
        proc = subprocess.run(
            [sys.executable, "-m", "metricforge.cli", "generate", "--kind",
             "grid", "--side", "3", "--spacing", "1.0", "-o", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert out.exists()

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "metricforge.cli", "generate", "--kind",
             "grid", "--side", "0", "--spacing", "1", "-o", "/tmp/x.json"],
            capture_output=True, text=True)
        assert proc.returncode == 2
