"""
Scalar oracle for the pointwise mean inequality

    A o B >= (A m_{r,lam} B) o (A m_{r,1-lam} B)

In dimension one the means commute and the inequality reduces, after
scaling a = 1, to b >= F_{r,lam}(b) * F_{r,1-lam}(b). Power means are
increasing in r with the geometric mean at r = 0, so the product sits above
b for r > 0 whenever b != 1 and 0 < lam < 1. The study below measures this
on a grid rather than assuming it; campaigns for the mean inequality only
assert cells the oracle validates and list the rest as refuted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .hermat import DEFAULT_TOLERANCES, Tolerances
from .means import MeanSpec, representing_function

DEFAULT_R_GRID: Tuple[float, ...] = (-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0)
DEFAULT_LAMBDA_GRID: Tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(1, 10))
DEFAULT_RATIO_GRID: Tuple[float, ...] = tuple(float(x) for x in np.geomspace(0.1, 10.0, 11))


def scalar_pointwise_gap(r: float, lam: float, ratio: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """b - F_{r,lam}(b) F_{r,1-lam}(b) for a = 1, b = ratio."""
    MeanSpec(r, lam)
    left = representing_function(r, lam, ratio, tol)
    right = representing_function(r, 1.0 - lam, ratio, tol)
    return ratio - left * right


@dataclass(frozen=True)
class OracleCell:
    r: float
    lam: float
    worst_gap: float
    worst_ratio: float
    validated: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "lambda": self.lam,
            "worst_gap": self.worst_gap,
            "worst_ratio": self.worst_ratio,
            "validated": self.validated,
        }


@dataclass
class OracleStudy:
    ratio_grid: Tuple[float, ...]
    cells: List[OracleCell] = field(default_factory=list)

    @property
    def refuted(self) -> List[OracleCell]:
        return [c for c in self.cells if not c.validated]

    @property
    def validated_region(self) -> List[Tuple[float, float]]:
        return [(c.r, c.lam) for c in self.cells if c.validated]

    def lookup(self, r: float, lam: float) -> OracleCell:
        for cell in self.cells:
            if cell.r == r and cell.lam == lam:
                return cell
        raise KeyError((r, lam))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio_grid": list(self.ratio_grid),
            "cells": [c.to_dict() for c in self.cells],
            "refuted": [[c.r, c.lam] for c in self.refuted],
        }


def _study_cell(r: float, lam: float, ratio_grid: Sequence[float], tol: Tolerances) -> OracleCell:
    worst_gap = np.inf
    worst_ratio = ratio_grid[0]
    worst_normalized = np.inf
    for ratio in ratio_grid:
        gap = scalar_pointwise_gap(r, lam, ratio, tol)
        normalized = gap / max(1.0, ratio)
        if normalized < worst_normalized:
            worst_normalized = normalized
            worst_gap = gap
            worst_ratio = ratio
    return OracleCell(
        r=r,
        lam=lam,
        worst_gap=float(worst_gap),
        worst_ratio=float(worst_ratio),
        validated=bool(worst_normalized >= -tol.psd_tol),
    )


def run_oracle_study(
    r_grid: Sequence[float] = DEFAULT_R_GRID,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    ratio_grid: Sequence[float] = DEFAULT_RATIO_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OracleStudy:
    if not ratio_grid:
        raise ValueError("ratio grid must be nonempty")
    for ratio in ratio_grid:
        if not ratio > 0:
            raise ValueError(f"ratios b/a must be positive, got {ratio}")
    study = OracleStudy(ratio_grid=tuple(float(x) for x in ratio_grid))
    for r in r_grid:
        for lam in lambda_grid:
            study.cells.append(_study_cell(float(r), float(lam), study.ratio_grid, tol))
    return study


def is_validated(
    r: float,
    lam: float,
    ratio_grid: Sequence[float] = DEFAULT_RATIO_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> bool:
    """Whether the scalar oracle finds no violation at (r, lam) across ratio_grid."""
    return _study_cell(float(r), float(lam), tuple(ratio_grid), tol).validated
