"""
End-to-end tests for the opcheb command line: exit codes, report files,
determinism and replay.
"""
import json
import tempfile
import unittest
from pathlib import Path
import sys

from typer.testing import CliRunner

sys.path.insert(0, str(Path(__file__).resolve().parents[3]))

from opcheb.verifier.src.verifier_cli import EXIT_OK, EXIT_PURPOSE_FAILED, EXIT_USAGE, app

SMALL = ["--trials", "1", "--dims", "1,2", "--points", "2,3"]


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def invoke(self, *args):
        return self.runner.invoke(app, list(args))

    def run_to_file(self, name, *args):
        out = self.root / name
        result = self.invoke(*args, "--out", str(out))
        report = json.loads(out.read_text()) if out.exists() else None
        return result, report


class TestVerify(CliTestCase):

    def test_synchronous_campaign_passes(self):
        result, report = self.run_to_file("thm21.json", "verify", "--inequality", "thm21", *SMALL)
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertEqual(report["command"], "verify")
        self.assertEqual(report["generator"], "scaled_pair")
        self.assertEqual(len(report["records"]), 4)
        self.assertEqual(report["summary"]["failed"], 0)
        self.assertNotIn("excluded_cells", report)

    def test_nonsynchronous_generator_fails(self):
        result, report = self.run_to_file(
            "bad.json", "verify", "--inequality", "thm21", "--generator", "nonsynchronous_pair", *SMALL
        )
        self.assertEqual(result.exit_code, EXIT_PURPOSE_FAILED)
        self.assertGreater(report["summary"]["failed"], 0)

    def test_mean_inequality_excludes_refuted_cells(self):
        result, report = self.run_to_file(
            "thm41.json", "verify", "--inequality", "thm41", "--trials", "2",
            "--dims", "1,2", "--points", "2,3", "--r-grid", "-1,0,0.5", "--lambda-grid", "0,0.5,1",
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertEqual(report["excluded_cells"], [
            {"r": 0.5, "lambda": 0.5, "reason": "pointwise mean inequality refuted by the scalar oracle"},
        ])
        self.assertEqual(report["summary"]["excluded"], 1)
        self.assertEqual(len(report["records"]), 2 * (9 - 1))
        self.assertIn("oracle", report)

    def test_exploratory_inequality_never_fails(self):
        result, report = self.run_to_file(
            "two.json", "verify", "--inequality", "thm41_two_weight", "--trials", "1",
            "--dims", "2", "--points", "3", "--r-grid", "-1,0", "--lambda-grid", "0.25",
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertFalse(report["summary"]["asserted"])

    def test_hypothesis_violation_is_a_usage_error(self):
        result = self.invoke(
            "verify", "--inequality", "thm41", "--generator", "nonsynchronous_pair", "--trials", "1",
            "--r-grid", "0", "--lambda-grid", "0.5",
        )
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_unknown_inequality(self):
        result = self.invoke("verify", "--inequality", "thm99")
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertIn("unknown inequality", result.output)

    def test_malformed_config(self):
        config = self.root / "bad.json"
        config.write_text("{oops")
        result = self.invoke("verify", "--config", str(config))
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_config_file_is_applied(self):
        config = self.root / "campaign.json"
        config.write_text(json.dumps({"inequality": "ineq15", "dims": [2], "n_points": [3], "trials": 2}))
        result, report = self.run_to_file("ineq15.json", "verify", "--config", str(config))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertEqual(report["inequality"], "ineq15")
        self.assertEqual([r["seed"] for r in report["records"]], [42, 43])

    def test_csv_output(self):
        out = self.root / "records.csv"
        result = self.invoke("verify", *SMALL, "--format", "csv", "--out", str(out))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        lines = out.read_text().splitlines()
        self.assertTrue(lines[0].startswith("inequality,seed,dim,n,r,lambda"))
        self.assertEqual(len(lines), 5)


class TestDeterminism(CliTestCase):

    def test_identical_runs_diff_clean(self):
        args = ("verify", "--inequality", "thm31", *SMALL, "--seed", "7")
        first, _ = self.run_to_file("a.json", *args)
        second, _ = self.run_to_file("b.json", *args)
        self.assertEqual(first.exit_code, EXIT_OK, first.output)
        self.assertEqual(second.exit_code, EXIT_OK, second.output)
        result = self.invoke("diff", str(self.root / "a.json"), str(self.root / "b.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)

    def test_different_seeds_differ(self):
        self.run_to_file("a.json", "verify", *SMALL, "--seed", "1")
        self.run_to_file("b.json", "verify", *SMALL, "--seed", "2")
        result = self.invoke("diff", str(self.root / "a.json"), str(self.root / "b.json"))
        self.assertEqual(result.exit_code, EXIT_PURPOSE_FAILED)

    def test_diff_missing_report(self):
        result = self.invoke("diff", str(self.root / "a.json"), str(self.root / "b.json"))
        self.assertEqual(result.exit_code, EXIT_USAGE)


class TestReplay(CliTestCase):

    def test_replay_reproduces_record(self):
        _, report = self.run_to_file("r.json", "verify", *SMALL)
        record = report["records"][-1]
        result = self.invoke("replay", record["inputs_digest"])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn(f"pass {record['min_eig']!r}", result.output)

    def test_replay_rejects_tampered_digest(self):
        result = self.invoke("replay", "thm21|scaled_pair|seed=1|dim=1|n=2|r=-|lambda=-#000000000000")
        self.assertEqual(result.exit_code, EXIT_USAGE)


class TestFalsify(CliTestCase):

    def test_finds_violation(self):
        result, report = self.run_to_file(
            "f.json", "falsify", "--inequality", "thm21", "--generator", "nonsynchronous_pair", "--trials", "1000"
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertTrue(report["falsification"]["violated"])
        self.assertEqual(report["records"][0]["verdict"], "fail")
        replayed = self.invoke("replay", report["falsification"]["digest"])
        self.assertEqual(replayed.exit_code, EXIT_PURPOSE_FAILED)

    def test_exhausts_trials(self):
        result, report = self.run_to_file(
            "f.json", "falsify", "--inequality", "thm21", "--generator", "scaled_pair", "--trials", "20"
        )
        self.assertEqual(result.exit_code, EXIT_PURPOSE_FAILED)
        self.assertFalse(report["falsification"]["violated"])
        self.assertEqual(report["records"], [])


class TestAxiomsAndOracle(CliTestCase):

    def test_axioms_pass(self):
        result, report = self.run_to_file(
            "ax.json", "axioms", "--trials", "2", "--dims", "1,2", "--r-grid", "-1,0,1", "--lambda-grid", "0.5",
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        kinds = {r["inequality"] for r in report["records"]}
        self.assertEqual(kinds, {"mean_axioms", "path_identity"})
        self.assertEqual(len(report["records"]), 3 * 2 + 3 * 2)

    def test_axioms_trial_count_does_not_follow_config_inequality(self):
        config = self.root / "mean.json"
        config.write_text(json.dumps({"inequality": "thm41", "dims": [1]}))
        result, report = self.run_to_file(
            "ax.json", "axioms", "--config", str(config), "--r-grid", "0", "--lambda-grid", "0.5",
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertEqual(report["config"]["trials"], 9)
        self.assertEqual(len(report["records"]), 1 + 9)

    def test_axioms_reject_r_outside_range(self):
        result = self.invoke("axioms", "--r-grid", "1.5")
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_oracle_lists_refuted_cells(self):
        result, report = self.run_to_file("o.json", "oracle")
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn([1.0, 0.5], report["oracle"]["refuted"])
        self.assertEqual(report["records"], [])


class TestDemoExample(CliTestCase):

    def test_variants(self):
        for variant in ("default", "constant", "increasing-g"):
            result = self.invoke("demo-example", "--variant", variant)
            self.assertEqual(result.exit_code, EXIT_OK, f"{variant}: {result.output}")

    def test_unknown_variant(self):
        result = self.invoke("demo-example", "--variant", "sideways")
        self.assertEqual(result.exit_code, EXIT_USAGE)


if __name__ == "__main__":
    unittest.main()
