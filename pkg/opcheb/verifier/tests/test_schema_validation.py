"""
Tests for JSON schema validation of reports and campaign configs.
"""
import unittest
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[3]))

from opcheb.verifier.src.core.chebyshev import run_cell
from opcheb.verifier.src.core.digest import Cell
from opcheb.verifier.src.core.render import (
    build_report,
    make_record,
    records_to_csv,
    serialize_report,
    summarize,
)
from opcheb.verifier.src.schema_validator import (
    SCHEMAS_DIR,
    load_schema,
    validate_against_schema,
    validate_config_json,
    validate_report_json,
)


def sample_report():
    cell = Cell("thm21", "scaled_pair", 42, 2, 3)
    records = [make_record(cell, run_cell(cell))]
    return build_report(
        "verify", {"inequality": "thm21"}, records, summarize(records, asserted=True),
        inequality="thm21", generator="scaled_pair",
    )


class TestSchemaLoading(unittest.TestCase):

    def test_schemas_exist(self):
        self.assertTrue((SCHEMAS_DIR / "report.schema.json").exists())
        self.assertTrue((SCHEMAS_DIR / "campaign_config.schema.json").exists())

    def test_load_schema(self):
        schema = load_schema("report.schema.json")
        self.assertIn("records", schema["properties"])

    def test_missing_schema(self):
        with self.assertRaises(FileNotFoundError):
            load_schema("nope.schema.json")
        errors = validate_against_schema({}, "nope.schema.json")
        self.assertEqual(len(errors), 1)
        self.assertTrue(errors[0].startswith("Schema error:"))


class TestReportSchema(unittest.TestCase):

    def test_built_report_is_valid(self):
        self.assertEqual(validate_report_json(sample_report()), [])

    def test_missing_required_field(self):
        report = sample_report()
        del report["summary"]
        errors = validate_report_json(report)
        self.assertTrue(any("summary" in e for e in errors))

    def test_tool_version_pattern(self):
        report = sample_report()
        report["tool_version"] = "other-1.0"
        self.assertTrue(validate_report_json(report))

    def test_record_verdict_enum(self):
        report = sample_report()
        report["records"][0]["verdict"] = "maybe"
        errors = validate_report_json(report)
        self.assertTrue(any(e.startswith("records.0.verdict") for e in errors))

    def test_serialize_refuses_invalid_report(self):
        report = sample_report()
        report["command"] = "explode"
        with self.assertRaises(RuntimeError):
            serialize_report(report, "json")

    def test_csv_has_header_and_rows(self):
        report = sample_report()
        lines = serialize_report(report, "csv").splitlines()
        self.assertEqual(lines[0], "inequality,seed,dim,n,r,lambda,min_eig,scale,verdict,inputs_digest,residual,identities_hold")
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].startswith("thm21,42,2,3,,,"))
        self.assertEqual(records_to_csv([]).strip(), lines[0])


class TestConfigSchema(unittest.TestCase):

    def test_valid_config(self):
        config = {
            "inequality": "thm41",
            "dims": [1, 2],
            "r_grid": [-1, 0],
            "lambda_grid": [0.5],
            "tolerances": {"psd_tol": 1e-9},
        }
        self.assertEqual(validate_config_json(config), [])

    def test_invalid_config(self):
        self.assertTrue(validate_config_json({"inequality": "thm99"}))
        self.assertTrue(validate_config_json({"lambda_grid": [2.0]}))
        self.assertTrue(validate_config_json({"tolerances": {"psd": 1}}))


if __name__ == "__main__":
    unittest.main()
