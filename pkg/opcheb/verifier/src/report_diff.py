"""
Deterministic comparison of two verifier reports.

Identical configs and seeds must give identical reports apart from
generated_at, which is the only field excluded here. Records are matched by
inputs_digest where present, else by position.
"""
from typing import Any, Dict, List

IGNORED_KEYS = frozenset({"generated_at"})


def _strip(report: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in report.items() if k not in IGNORED_KEYS}


def _record_key(index: int, record: Dict[str, Any]) -> str:
    return record.get("inputs_digest") or f"#{index}"


def _diff_records(records_a: List[Dict[str, Any]], records_b: List[Dict[str, Any]]) -> Dict[str, Any]:
    keyed_a = {_record_key(i, r): r for i, r in enumerate(records_a)}
    keyed_b = {_record_key(i, r): r for i, r in enumerate(records_b)}
    added = sorted(set(keyed_b) - set(keyed_a))
    removed = sorted(set(keyed_a) - set(keyed_b))
    changed = []
    for key in sorted(set(keyed_a) & set(keyed_b)):
        a, b = keyed_a[key], keyed_b[key]
        fields = sorted(f for f in set(a) | set(b) if a.get(f) != b.get(f))
        if fields:
            changed.append({"key": key, "fields": fields})
    return {"added": added, "removed": removed, "changed": changed}


def compare_reports(report_a: Dict[str, Any], report_b: Dict[str, Any]) -> Dict[str, Any]:
    stripped_a = _strip(report_a)
    stripped_b = _strip(report_b)
    records = _diff_records(stripped_a.get("records", []), stripped_b.get("records", []))
    envelope = sorted(
        k for k in (set(stripped_a) | set(stripped_b)) - {"records"}
        if stripped_a.get(k) != stripped_b.get(k)
    )
    identical = stripped_a == stripped_b
    return {
        "identical": identical,
        "envelope_changes": envelope,
        "records": records,
        "report_a": {"generated_at": report_a.get("generated_at")},
        "report_b": {"generated_at": report_b.get("generated_at")},
    }


def render_diff_summary(diff: Dict[str, Any]) -> List[str]:
    if diff["identical"]:
        return ["Reports are identical (generated_at ignored)."]
    lines = []
    if diff["envelope_changes"]:
        lines.append(f"Envelope fields differ: {', '.join(diff['envelope_changes'])}")
    records = diff["records"]
    if records["added"]:
        lines.append(f"{len(records['added'])} record(s) only in the second report")
    if records["removed"]:
        lines.append(f"{len(records['removed'])} record(s) only in the first report")
    for change in records["changed"][:10]:
        lines.append(f"{change['key']}: {', '.join(change['fields'])}")
    return lines
