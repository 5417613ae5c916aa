"""
Schema validation for campaign configs and reports.

Reports are validated before they are written and config files before they
are applied, so a contract violation never reaches disk or a campaign.
All schemas live in shared/schemas.
"""
import json
from pathlib import Path
from typing import Any, Dict, List

from jsonschema import Draft7Validator

SCHEMAS_DIR = Path(__file__).resolve().parents[3] / "shared" / "schemas"

REPORT_SCHEMA = "report.schema.json"
CONFIG_SCHEMA = "campaign_config.schema.json"


def load_schema(schema_name: str) -> Dict[str, Any]:
    schema_path = SCHEMAS_DIR / schema_name
    if not schema_path.exists():
        raise FileNotFoundError(
            f"Schema not found: {schema_path}. "
            f"Expected schema directory: {SCHEMAS_DIR}"
        )
    with open(schema_path, "r") as f:
        return json.load(f)


def validate_against_schema(data: Any, schema_name: str) -> List[str]:
    """
    Validate data against a schema.

    Returns:
        List of "path: message" errors (empty if valid)
    """
    try:
        validator = Draft7Validator(load_schema(schema_name))
    except FileNotFoundError as e:
        return [f"Schema error: {e}"]
    errors = []
    for error in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.path))):
        path = ".".join(str(p) for p in error.path) if error.path else "root"
        errors.append(f"{path}: {error.message}")
    return errors


def validate_report_json(data: Dict[str, Any]) -> List[str]:
    return validate_against_schema(data, REPORT_SCHEMA)


def validate_config_json(data: Any) -> List[str]:
    return validate_against_schema(data, CONFIG_SCHEMA)
