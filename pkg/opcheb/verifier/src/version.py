"""
Version information for opcheb.

Single source of truth for version numbers, read from pyproject.toml.
Reports carry tool_version as "opcheb-{version}".
"""
import re
from pathlib import Path

FALLBACK_VERSION = "0.1.0"


def get_raw_version() -> str:
    """Version from pyproject.toml, e.g. "0.1.0"."""
    try:
        pyproject_path = Path(__file__).resolve().parents[3] / "pyproject.toml"
        if not pyproject_path.exists():
            return FALLBACK_VERSION
        match = re.search(r'^version\s*=\s*"([^"]+)"', pyproject_path.read_text(), re.MULTILINE)
        if match:
            return match.group(1)
    except OSError:
        pass
    return FALLBACK_VERSION


def get_tool_version() -> str:
    return f"opcheb-{get_raw_version()}"


REPORT_SCHEMA_VERSION = "1.0"

TOOL_VERSION = get_tool_version()
