"""
Report assembly and emission.

JSON reports are validated against report.schema.json before anything is
written; CSV reports carry the record fields with a header row. Console
tables go to the diagnostics console, never to the report stream.
"""
import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from .chebyshev import GapReport
from .digest import Cell
from ..schema_validator import validate_report_json
from ..version import REPORT_SCHEMA_VERSION, TOOL_VERSION

RECORD_FIELDS = (
    "inequality", "seed", "dim", "n", "r", "lambda",
    "min_eig", "scale", "verdict", "inputs_digest", "residual", "identities_hold",
)


def make_record(cell: Cell, report: GapReport) -> Dict[str, Any]:
    return {
        "inequality": cell.inequality,
        "seed": cell.seed,
        "dim": cell.dim,
        "n": cell.n,
        "r": cell.r,
        "lambda": cell.lam,
        "min_eig": report.min_eig,
        "scale": report.scale,
        "verdict": report.verdict.value,
        "inputs_digest": report.inputs_digest,
        "residual": report.residual,
        "identities_hold": report.identities_hold,
    }


def summarize(records: Sequence[Dict[str, Any]], asserted: bool, excluded: int = 0) -> Dict[str, Any]:
    passed = sum(1 for r in records if r["verdict"] == "pass")
    normalized = [
        (r["min_eig"] / max(1.0, r["scale"] or 0.0), r["min_eig"])
        for r in records if r["min_eig"] is not None
    ]
    return {
        "cells": len(records),
        "passed": passed,
        "failed": len(records) - passed,
        "excluded": excluded,
        "asserted": asserted,
        "worst_min_eig": min(normalized)[1] if normalized else None,
    }


def build_report(
    command: str,
    config: Dict[str, Any],
    records: List[Dict[str, Any]],
    summary: Dict[str, Any],
    inequality: Optional[str] = None,
    generator: Optional[str] = None,
    **sections: Any,
) -> Dict[str, Any]:
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "inequality": inequality,
        "generator": generator,
        "config": config,
        "records": records,
        "summary": summary,
    }
    report.update({k: v for k, v in sections.items() if v is not None})
    return report


def records_to_csv(records: Sequence[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=RECORD_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({k: ("" if record.get(k) is None else record.get(k)) for k in RECORD_FIELDS})
    return buffer.getvalue()


def serialize_report(report: Dict[str, Any], fmt: str) -> str:
    errors = validate_report_json(report)
    if errors:
        raise RuntimeError(
            f"report schema validation failed ({len(errors)} error(s)):\n"
            + "\n".join(f"  - {e}" for e in errors)
        )
    if fmt == "csv":
        return records_to_csv(report["records"])
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def save_report(report: Dict[str, Any], fmt: str, output_path: Optional[str]) -> Optional[Path]:
    """Write to output_path, or to stdout when it is None."""
    content = serialize_report(report, fmt)
    if output_path is None:
        print(content, end="")
        return None
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(content)
    return path


def load_report(path: Path) -> Dict[str, Any]:
    with open(path, "r") as f:
        return json.load(f)


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3e}"


def print_failures(console: Console, records: Sequence[Dict[str, Any]], limit: int = 10) -> None:
    failures = [r for r in records if r["verdict"] == "fail"]
    if not failures:
        return
    table = Table(title=f"Failing cells ({len(failures)})")
    for column in ("seed", "dim", "n", "r", "lambda", "min_eig", "inputs_digest"):
        table.add_column(column)
    for record in failures[:limit]:
        table.add_row(
            str(record["seed"]), str(record["dim"]), str(record["n"]),
            "-" if record["r"] is None else str(record["r"]),
            "-" if record["lambda"] is None else str(record["lambda"]),
            _fmt(record["min_eig"]),
            record["inputs_digest"] or "-",
        )
    console.print(table)
    if len(failures) > limit:
        console.print(f"  ... {len(failures) - limit} more in the report")


def print_oracle(console: Console, oracle: Dict[str, Any]) -> None:
    table = Table(title="Pointwise mean oracle")
    table.add_column("r")
    table.add_column("lambda")
    table.add_column("worst gap")
    table.add_column("at b/a")
    table.add_column("status")
    for cell in oracle["cells"]:
        status = "[green]validated[/green]" if cell["validated"] else "[red]refuted[/red]"
        table.add_row(
            str(cell["r"]), str(cell["lambda"]), _fmt(cell["worst_gap"]),
            f"{cell['worst_ratio']:.4g}", status,
        )
    console.print(table)
