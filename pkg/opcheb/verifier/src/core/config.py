"""
Campaign configuration.

Precedence, lowest to highest: field defaults, environment (OPCHEB_PSD_TOL,
OPCHEB_RECON_TOL, OPCHEB_ZERO_R_CUTOFF, usually from .env), the JSON config
file, command-line flags. Every layer is validated; bad values raise
ConfigError.
"""
import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .chebyshev import get_inequality
from .errors import ConfigError
from .fields import get_generator
from .hermat import DEFAULT_TOLERANCES, Tolerances
from ..schema_validator import validate_config_json

ENV_TOLERANCES = {
    "OPCHEB_PSD_TOL": "psd_tol",
    "OPCHEB_RECON_TOL": "recon_tol",
    "OPCHEB_ZERO_R_CUTOFF": "zero_r_cutoff",
}

# thm21 default: 9 seeds x 5 dims x 7 point counts = 315 cells.
DEFAULT_PAIRWISE_TRIALS = 9
# thm41 default: 8 seeds x 5 r x 5 lambda = 200 cells.
DEFAULT_MEAN_GRID_TRIALS = 8
# axioms default, independent of the configured inequality.
DEFAULT_AXIOM_TRIALS = 9


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


@dataclass
class CampaignConfig:
    inequality: str = "thm21"
    generator: Optional[str] = None
    dims: List[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    n_points: List[int] = field(default_factory=lambda: [2, 3, 4, 5, 6, 7, 8])
    trials: Optional[int] = None
    seed: int = 42
    r_grid: List[float] = field(default_factory=lambda: [-1.0, -0.5, 0.0, 0.5, 1.0])
    lambda_grid: List[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    tolerances: Tolerances = DEFAULT_TOLERANCES
    output_format: OutputFormat = OutputFormat.json
    output_path: Optional[str] = None

    @property
    def effective_generator(self) -> str:
        return self.generator or get_inequality(self.inequality).default_generator

    @property
    def effective_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        if get_inequality(self.inequality).uses_mean_grid:
            return DEFAULT_MEAN_GRID_TRIALS
        return DEFAULT_PAIRWISE_TRIALS

    @property
    def axiom_trials(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_AXIOM_TRIALS

    def validate(self) -> "CampaignConfig":
        get_inequality(self.inequality)
        if self.generator is not None:
            get_generator(self.generator)
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError(f"dims must be a nonempty list of positive integers, got {self.dims}")
        if not self.n_points or any(n < 1 for n in self.n_points):
            raise ConfigError(f"n_points must be a nonempty list of positive integers, got {self.n_points}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if not self.r_grid or any(not -1.0 <= r <= 1.0 for r in self.r_grid):
            raise ConfigError(f"r_grid values must lie in [-1, 1], got {self.r_grid}")
        if not self.lambda_grid or any(not 0.0 <= lam <= 1.0 for lam in self.lambda_grid):
            raise ConfigError(f"lambda_grid values must lie in [0, 1], got {self.lambda_grid}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inequality": self.inequality,
            "generator": self.effective_generator,
            "dims": list(self.dims),
            "n_points": list(self.n_points),
            "trials": self.effective_trials,
            "seed": self.seed,
            "r_grid": list(self.r_grid),
            "lambda_grid": list(self.lambda_grid),
            "tolerances": self.tolerances.to_dict(),
            "output_format": self.output_format.value,
        }


def _tolerances(base: Tolerances, values: Mapping[str, float], source: str) -> Tolerances:
    try:
        return replace(base, **values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid tolerances from {source}: {e}") from None


def env_tolerances(base: Tolerances = DEFAULT_TOLERANCES, environ: Optional[Mapping[str, str]] = None) -> Tolerances:
    environ = os.environ if environ is None else environ
    values = {}
    for key, name in ENV_TOLERANCES.items():
        raw = environ.get(key)
        if raw is None or raw.strip() == "":
            continue
        try:
            values[name] = float(raw)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from None
    return _tolerances(base, values, "environment") if values else base


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from None
    errors = validate_config_json(data)
    if errors:
        raise ConfigError(
            f"config file {path} failed schema validation ({len(errors)} error(s)):\n"
            + "\n".join(f"  - {e}" for e in errors)
        )
    return data


def parse_int_list(text: str, option: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{option} expects comma-separated integers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{option} must not be empty")
    return values


def parse_float_list(text: str, option: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{option} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{option} must not be empty")
    return values


def _apply(config: CampaignConfig, values: Mapping[str, Any], source: str) -> CampaignConfig:
    updates = {k: v for k, v in values.items() if v is not None and k != "tolerances"}
    if "output_format" in updates:
        updates["output_format"] = OutputFormat(updates["output_format"])
    config = replace(config, **updates)
    if values.get("tolerances"):
        config = replace(config, tolerances=_tolerances(config.tolerances, values["tolerances"], source))
    return config


def build_config(
    config_path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> CampaignConfig:
    """Resolve a CampaignConfig; overrides are flag values, None meaning unset."""
    config = CampaignConfig(tolerances=env_tolerances(DEFAULT_TOLERANCES, environ))
    if config_path is not None:
        config = _apply(config, load_config_file(config_path), str(config_path))
    if overrides:
        config = _apply(config, overrides, "flags")
    return config.validate()
