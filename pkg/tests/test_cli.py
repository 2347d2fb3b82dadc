"""
End-to-end tests of the command-line interface.
"""
import csv
import json
import math
import os
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from typer.testing import CliRunner

from kgalerkin.utils.history import reset_history_logger
from scripts.python.cli import app

LOWEST_SN_COEFFS = [2.62567, 0, 0.493473, 0, 0.119402, 0, 0.0292736, 0, 0.00718, 0]
SN_ENERGIES = [9.49008, 18.77293, 24.83282]
CN_ENERGIES = [-1.45534, 6.29612, 24.8724]


def read_csv(path):
    with open(path, newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def metadata_lines(path):
    with open(path) as handle:
        return [line for line in handle if line.startswith("#")]


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.mkdtemp()
        reset_history_logger()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)
        reset_history_logger()

    def invoke(self, *args, out=None):
        return self.runner.invoke(app, [*args, "--out", out or self.tmp])

    def path(self, name, out=None):
        return Path(out or self.tmp) / name


class TestStationaryCommand(CliTestCase):
    def test_negative_lambda_branches(self):
        result = self.invoke("stationary", "--lambda", "-10", "--nmax", "10")
        self.assertEqual(result.exit_code, 0, result.output)
        rows = read_csv(self.path("stationary_coefficients.csv"))
        self.assertEqual(len(rows), 10)
        for row, expected in zip(rows, LOWEST_SN_COEFFS):
            self.assertAlmostEqual(float(row["S_1"]), expected, delta=1e-4)
        branches = read_csv(self.path("stationary_branches.csv"))
        energies = [float(b["energy"]) for b in branches]
        for value, expected in zip(energies, SN_ENERGIES):
            self.assertAlmostEqual(value, expected, delta=1e-4)
        self.assertTrue(any("seed" in line for line in metadata_lines(self.path("stationary_branches.csv"))))

    def test_positive_lambda_branches(self):
        result = self.invoke("stationary", "--lambda", "5", "--branches", "3", "--nmax", "10")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("stationary_summary.json").read_text())
        self.assertEqual(summary["branches_available"], "unbounded")
        for value, expected in zip(summary["energies"], CN_ENERGIES):
            self.assertAlmostEqual(value, expected, delta=1e-3)

    def test_large_lambda(self):
        result = self.invoke("stationary", "--lambda", "-200", "--branches", "3", "--nmax", "8")
        self.assertEqual(result.exit_code, 0, result.output)
        branches = read_csv(self.path("stationary_branches.csv"))
        self.assertEqual(len(branches), 3)
        self.assertNotIn("1", [b["branch_n"] for b in branches])

    def test_no_branches(self):
        result = self.invoke("stationary", "--lambda", "-0.5")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(read_csv(self.path("stationary_branches.csv")), [])
        summary = json.loads(self.path("stationary_summary.json").read_text())
        self.assertEqual(summary["count"], 0)

    def test_linear_theory_rejected(self):
        result = self.invoke("stationary", "--lambda", "0")
        self.assertEqual(result.exit_code, 2)

    def test_physical_parameters(self):
        result = self.invoke(
            "stationary", "--beta", "1", "--phi0", repr(math.sqrt(10.0)), "--ell", repr(math.pi), "--profiles"
        )
        self.assertEqual(result.exit_code, 0, result.output)
        branches = read_csv(self.path("stationary_branches.csv"))
        self.assertEqual(len(branches), 3)
        self.assertIn("energy_physical", branches[0])
        profiles = read_csv(self.path("stationary_profiles.csv"))
        self.assertIn("phi_1", profiles[0])
        self.assertLessEqual(abs(float(profiles[0]["u_1"])), 1e-12)

    def test_conflicting_parameters(self):
        result = self.invoke("stationary", "--lambda", "-10", "--beta", "1")
        self.assertEqual(result.exit_code, 2)

    def test_json_format(self):
        result = self.invoke("stationary", "--lambda", "-10", "--format", "json")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("stationary_summary.json").read_text())
        self.assertAlmostEqual(summary["coefficients"]["S_1"][0], 2.62567, delta=1e-4)
        self.assertFalse(self.path("stationary_branches.csv").exists())


class TestEvolveCommand(CliTestCase):
    def test_linear_oscillator(self):
        result = self.invoke("evolve", "--lambda", "0", "--n", "1", "--init", "A=1", "--tmax", "3.14159")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("evolve_summary.json").read_text())
        self.assertAlmostEqual(summary["final_A"][0], -1.0, delta=1e-5)
        rows = read_csv(self.path("trajectory.csv"))
        self.assertEqual(list(rows[0].keys()), ["tau", "A_1", "V_1", "H"])

    def test_deterministic_output(self):
        other = tempfile.mkdtemp()
        try:
            args = ("evolve", "--lambda", "-10", "--n", "6", "--init", "A=1,1,-1,1", "--tmax", "0.5")
            self.assertEqual(self.invoke(*args).exit_code, 0)
            self.assertEqual(self.invoke(*args, out=other).exit_code, 0)
            for name in ("trajectory.csv", "evolve_summary.json"):
                self.assertEqual(self.path(name).read_bytes(), self.path(name, other).read_bytes())
        finally:
            shutil.rmtree(other, ignore_errors=True)

    def test_field_file_and_snapshot(self):
        field = Path(self.tmp) / "u0.csv"
        xi = [math.pi * j / 256 for j in range(257)]
        field.write_text("xi,value\n" + "".join(f"{x!r},{math.sqrt(2.0) * math.sin(x)!r}\n" for x in xi))
        result = self.invoke(
            "evolve", "--lambda", "-10", "--n", "4", "--init", str(field), "--tmax", "0.01", "--snapshot-grid", "65"
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(read_csv(self.path("snapshot.csv"))), 65)

    def test_malformed_init(self):
        result = self.invoke("evolve", "--lambda", "-10", "--n", "4", "--init", "B=1,2")
        self.assertEqual(result.exit_code, 2)
        result = self.invoke("evolve", "--lambda", "-10", "--n", "2", "--init", "A=1,2,3")
        self.assertEqual(result.exit_code, 2)

    def test_divergence_exit_code(self):
        result = self.invoke("evolve", "--lambda", "5", "--n", "1", "--init", "A=3", "--tmax", "10")
        self.assertEqual(result.exit_code, 3)


class TestCriticalCommand(CliTestCase):
    def test_lowest_critical_points(self):
        result = self.invoke("critical", "--lambda", "-10", "--n", "5", "--points", "3")
        self.assertEqual(result.exit_code, 0, result.output)
        rows = read_csv(self.path("critical_points.csv"))
        for row, expected in zip(rows, (9.51594, 19.0, 24.8333)):
            self.assertAlmostEqual(float(row["U"]), expected, delta=1e-4)
        self.assertIn("classification", rows[0])

    def test_landscape(self):
        result = self.invoke("critical", "--lambda", "-10", "--n", "3", "--landscape", "--range", "4", "--resolution", "21")
        self.assertEqual(result.exit_code, 0, result.output)
        rows = read_csv(self.path("landscape.csv"))
        self.assertEqual(len(rows), 21 * 21)
        origin = [r for r in rows if abs(float(r["A1"])) < 1e-12 and abs(float(r["A3"])) < 1e-12]
        self.assertAlmostEqual(float(origin[0]["U"]), 25.0, places=12)

    def test_landscape_command(self):
        result = self.invoke("landscape", "--lambda", "5", "--range", "2", "--resolution", "11")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(read_csv(self.path("landscape.csv"))), 121)


class TestResidualCommand(CliTestCase):
    def test_spectral_exactness(self):
        result = self.invoke("residual", "--state", "A=1", "--n", "3")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("residual_summary.json").read_text())
        self.assertLessEqual(summary["total"], 1e-10)

    def test_closed_form(self):
        result = self.invoke("residual", "--state", "A=1,0", "--n", "2")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("residual_summary.json").read_text())
        self.assertAlmostEqual(summary["total"], math.sqrt(2.0) / math.pi, delta=1e-6)
        self.assertEqual(list(read_csv(self.path("residual_local.csv"))[0].keys()), ["xi", "R_local"])

    def test_state_from_evolve_summary(self):
        evolved = Path(self.tmp) / "evolved"
        args = ("evolve", "--lambda", "-10", "--n", "4", "--init", "A=1,1,-1,1", "--tmax", "0.1")
        self.assertEqual(self.invoke(*args, out=str(evolved)).exit_code, 0)
        result = self.invoke("residual", "--state", str(evolved / "evolve_summary.json"))
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads(self.path("residual_summary.json").read_text())
        self.assertEqual(summary["N"], 4)
        self.assertGreater(summary["total"], 0.0)

    def test_metadata_has_no_lambda(self):
        result = self.invoke("residual", "--state", "A=1,0.5", "--n", "2")
        self.assertEqual(result.exit_code, 0, result.output)
        config = json.loads(self.path("residual_summary.json").read_text())["metadata"]["config"]
        self.assertIsNone(config["lam"])
        self.assertNotIn("parameter_free", config)
        self.assertEqual(config["N"], 2)

    def test_malformed_state(self):
        result = self.invoke("residual", "--state", "A=1,x")
        self.assertEqual(result.exit_code, 2)


class TestTensorCommand(CliTestCase):
    def test_dump(self):
        result = self.invoke("tensor", "--max-index", "3")
        self.assertEqual(result.exit_code, 0, result.output)
        rows = read_csv(self.path("tensor.csv"))
        values = {(r["n"], r["m"], r["p"], r["q"]): float(r["D"]) for r in rows}
        self.assertEqual(values[("1", "1", "1", "1")], 1.5)
        self.assertEqual(values[("1", "1", "1", "3")], -0.5)
        self.assertNotIn(("1", "1", "1", "2"), values)

    def test_metadata_has_no_lambda(self):
        self.assertEqual(self.invoke("tensor", "--max-index", "2").exit_code, 0)
        config_line = next(line for line in metadata_lines(self.path("tensor.csv")) if line.startswith("# config:"))
        config = json.loads(config_line[len("# config:"):])
        self.assertIsNone(config["lam"])
        self.assertEqual(config["N"], 2)


class TestRunHistory(CliTestCase):
    def test_history_file(self):
        history = Path(self.tmp) / "history.jsonl"
        with patch.dict(os.environ, {"KG_HISTORY_FILE": str(history)}):
            reset_history_logger()
            self.invoke("tensor", "--max-index", "2")
            self.invoke("stationary", "--lambda", "0")
        entries = [json.loads(line) for line in history.read_text().splitlines()]
        self.assertEqual([e["command"] for e in entries], ["tensor", "stationary"])
        self.assertTrue(entries[0]["success"])
        self.assertFalse(entries[1]["success"])
        self.assertIn("error", entries[1])


if __name__ == "__main__":
    unittest.main()
