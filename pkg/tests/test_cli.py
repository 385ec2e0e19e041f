import json
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from symred.cli import (EXIT_OK, EXIT_UNMET, load_metric_file, main,
                        render_markdown, report_schema, run_case,
                        serialize_generator)
from symred import catalog

DEMO_DIR = pathlib.Path(__file__).resolve().parent.parent / "demos" / "cases"


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "symred.cli", *args],
        capture_output=True, text=True, timeout=600)
    return proc


class TestSubprocess:
    def test_validate_case(self):
        proc = run_cli("validate", "--case", "decomposable_flat_1p2")
        assert proc.returncode == EXIT_OK
        assert "X_1: KV" in proc.stdout

    def test_validate_metric_file(self):
        proc = run_cli("validate", str(DEMO_DIR / "petrov_III.toml"))
        assert proc.returncode == EXIT_OK
        assert "H: HV, psi = 1" in proc.stdout

    def test_validate_detects_mismatch(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("""
[space]
coords = ["x", "y"]
[metric]
rows = [["1", "0"], ["0", "x^2"]]
[vector.V]
components = ["1", "0"]
kind = "KV"
""")
        proc = run_cli("validate", str(bad))
        assert proc.returncode == EXIT_UNMET
        assert "unmet" in proc.stderr

    def test_heat_symmetries_json(self):
        proc = run_cli("heat-symmetries", "--case", "decomposable_flat_1p2",
                       "--json")
        assert proc.returncode == EXIT_OK
        data = json.loads(proc.stdout)
        names = {g["name"] for g in data["heat_symmetries"]}
        assert {"X_t", "X_u", "X_b", "X_1", "X_1_sq"} <= names

    def test_reduce(self):
        proc = run_cli("reduce", "--case", "decomposable_flat_1p2",
                       "--by", "X_1_sq")
        assert proc.returncode == EXIT_OK
        assert "nu = exp" in proc.stdout

    def test_commutators(self):
        proc = run_cli("commutators", "--case", "decomposable_flat_1p2")
        assert proc.returncode == EXIT_OK
        assert "[X_t, X_1_sq] = (1)*X_1" in proc.stdout

    def test_collineations(self):
        proc = run_cli("collineations", "--case", "decomposable_flat_1p2",
                       "--kind", "KV", "--ansatz-degree", "1")
        assert proc.returncode == EXIT_OK
        assert "psi = 0" in proc.stdout

    def test_classify_flux_branch(self):
        proc = run_cli("classify", "--case", "decomposable_flat_1p2",
                       "--by", "X_1_sq")
        assert proc.returncode == EXIT_OK
        assert "X_tau" in proc.stdout

    def test_missing_target_errors(self):
        proc = run_cli("validate")
        assert proc.returncode == 2  # argparse usage error
        assert "either --case or a metric file" in proc.stderr


class TestPaperSuite:
    def test_single_case_json_schema(self):
        proc = run_cli("paper-suite", "--case", "decomposable_flat_1p2",
                       "--json")
        assert proc.returncode == EXIT_OK
        report = json.loads(proc.stdout)
        jsonschema.validate(report, report_schema())
        assert report["case"] == "decomposable_flat_1p2"
        assert report["numeric"]["max_residual"] <= 1e-9
        t2 = report["reductions"][1]["type2_hidden"]
        assert [g["name"] for g in t2] == ["X_tau"]


class TestInProcess:
    def test_run_case_report_validates(self):
        run = run_case(catalog.get_case("decomposable_flat_1p2"))
        assert run.failures == []
        jsonschema.validate(run.report, report_schema())

    def test_markdown_render(self):
        run = run_case(catalog.get_case("decomposable_flat_1p2"))
        md = render_markdown(run.report)
        assert "# Case decomposable_flat_1p2" in md
        assert "## Reduction by X_1_sq" in md

    def test_serialize_generator_shape(self):
        run = run_case(catalog.get_case("decomposable_flat_1p2"),
                       reductions=False)
        g = run.algebra.named("X_1_sq")
        ser = serialize_generator("X_1_sq", g)
        assert ser["basis"][0] == "d_t"
        assert len(ser["basis"]) == len(ser["coefficients"])

    def test_main_returns_int(self):
        rc = main(["validate", "--case", "decomposable_flat_1p2"])
        assert rc == EXIT_OK

    def test_load_metric_file_boxes(self):
        mf = load_metric_file(str(DEMO_DIR / "decomposable_flat_1p2.toml"))
        assert mf.metric.chart.box["x"] == (0.5, 2.0)
        assert mf.reduce_by == "X_1"
