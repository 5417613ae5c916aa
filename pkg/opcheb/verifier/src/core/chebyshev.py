"""
Chebyshev-type inequalities assembled as explicit gap matrices.

Every inequality LHS >= RHS becomes gap = LHS - RHS, certified PSD with the
relative slack -psd_tol * max(1, scale), where scale is the largest Frobenius
norm among the assembled terms.

Integrals are nonnegative weighted sums over the field points. lam is the
mean parameter of the power-mean inequality; it is kept distinct from the
weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .digest import Cell, decode_digest, encode_cell
from .errors import (
    HypothesisViolation,
    IndexOutOfRange,
    LengthMismatch,
    ShapeMismatch,
    UnknownInequality,
)
from .fields import (
    OperatorField,
    RawField,
    WeightVector,
    check_increasing_positive,
    get_generator,
    integrate,
    random_weights,
)
from .hermat import DEFAULT_TOLERANCES, HermitianMatrix, Tolerances, hermitize, loewner_leq, min_eigenvalue
from .means import MeanSpec, power_mean
from .products import hadamard

# Telescoping and pair-sum identities are exact up to roundoff.
IDENTITY_TOL = 1e-10


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True, eq=False)
class GapReport:
    name: str
    gap: HermitianMatrix
    min_eig: float
    scale: float
    verdict: Verdict
    inputs_digest: Optional[str] = None
    residual: Optional[float] = None
    # Set where identities are checked alongside the gap; False forces FAIL.
    identities_hold: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def _verdict(min_eig: float, scale: float, tol: Tolerances) -> Verdict:
    return Verdict.PASS if min_eig >= -tol.psd_tol * max(1.0, scale) else Verdict.FAIL


def _assemble(
    name: str,
    positive: Sequence[HermitianMatrix],
    negative: Sequence[HermitianMatrix],
    tol: Tolerances,
) -> GapReport:
    gap = positive[0]
    for term in positive[1:]:
        gap = gap + term
    for term in negative:
        gap = gap - term
    scale = max(term.frobenius for term in (*positive, *negative))
    smallest = min_eigenvalue(gap)
    return GapReport(name=name, gap=gap, min_eig=smallest, scale=scale, verdict=_verdict(smallest, scale, tol))


def _require_pair(F: OperatorField, G: OperatorField, *weights: WeightVector) -> None:
    if F.n != G.n or F.dim != G.dim:
        raise ShapeMismatch(f"fields differ in shape: n={F.n}/{G.n}, dim={F.dim}/{G.dim}")
    for w in weights:
        if len(w) != F.n:
            raise ShapeMismatch(f"field has {F.n} points but a weight vector has {len(w)}")


def _product_field(F: OperatorField, G: OperatorField) -> OperatorField:
    return OperatorField(F.points, tuple(hadamard(A, B) for A, B in zip(F.matrices, G.matrices)))


def scalar_chebyshev(w: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """T(w; a, b) = sum(w) sum(w a b) - sum(w a) sum(w b)."""
    if not len(w) == len(a) == len(b):
        raise LengthMismatch(f"lengths differ: w={len(w)}, a={len(a)}, b={len(b)}")
    w = np.asarray(w, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return math.fsum(w) * math.fsum(w * a * b) - math.fsum(w * a) * math.fsum(w * b)


def scalar_two_weight_chebyshev(
    omega: Sequence[float], nu: Sequence[float], a: Sequence[float], b: Sequence[float]
) -> float:
    """sum(omega) sum(nu a b) + sum(nu) sum(omega a b) - sum(omega a) sum(nu b) - sum(nu a) sum(omega b)."""
    if not len(omega) == len(nu) == len(a) == len(b):
        raise LengthMismatch(f"lengths differ: omega={len(omega)}, nu={len(nu)}, a={len(a)}, b={len(b)}")
    omega, nu, a, b = (np.asarray(x, dtype=float) for x in (omega, nu, a, b))
    return (
        math.fsum(omega) * math.fsum(nu * a * b)
        + math.fsum(nu) * math.fsum(omega * a * b)
        - math.fsum(omega * a) * math.fsum(nu * b)
        - math.fsum(nu * a) * math.fsum(omega * b)
    )


def _two_weight_terms(
    F: OperatorField, G: OperatorField, alpha: WeightVector, beta: WeightVector
) -> Tuple[List[HermitianMatrix], List[HermitianMatrix]]:
    products = _product_field(F, G)
    positive = [
        alpha.total * integrate(products, beta),
        beta.total * integrate(products, alpha),
    ]
    negative = [
        hadamard(integrate(F, alpha), integrate(G, beta)),
        hadamard(integrate(F, beta), integrate(G, alpha)),
    ]
    return positive, negative


def gap_two_weight(
    F: OperatorField, G: OperatorField, alpha: WeightVector, beta: WeightVector,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GapReport:
    _require_pair(F, G, alpha, beta)
    positive, negative = _two_weight_terms(F, G, alpha, beta)
    return _assemble("thm21", positive, negative, tol)


def gap_discrete(
    F: OperatorField, G: OperatorField, omega: WeightVector, nu: WeightVector,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GapReport:
    """Atomic-weight instance of gap_two_weight, reported under its own name."""
    _require_pair(F, G, omega, nu)
    positive, negative = _two_weight_terms(F, G, omega, nu)
    return _assemble("cor22", positive, negative, tol)


def gap_single_weight(
    F: OperatorField, G: OperatorField, alpha: WeightVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> GapReport:
    """sum(alpha) * integral(A o B) - integral(A) o integral(B)."""
    _require_pair(F, G, alpha)
    positive = [alpha.total * integrate(_product_field(F, G), alpha)]
    negative = [hadamard(integrate(F, alpha), integrate(G, alpha))]
    return _assemble("ineq15", positive, negative, tol)


def q_increment(
    k: int, F: OperatorField, G: OperatorField, omega: WeightVector, nu: WeightVector
) -> HermitianMatrix:
    """
    Q(k) - Q(k-1) for 1-based k:

        omega_k sum_{j<k} nu_j dA o dB + nu_k sum_{j<k} omega_j dA o dB

    with dA = A_k - A_j and dB = B_k - B_j.
    """
    _require_pair(F, G, omega, nu)
    if not 2 <= k <= F.n:
        raise IndexOutOfRange(f"increment index k must lie in [2, {F.n}], got {k}")
    last = k - 1
    total = HermitianMatrix.zeros(F.dim)
    for j in range(last):
        coefficient = omega.values[last] * nu.values[j] + nu.values[last] * omega.values[j]
        if coefficient == 0.0:
            continue
        product = hadamard(F.matrices[last] - F.matrices[j], G.matrices[last] - G.matrices[j])
        total = total + coefficient * product
    return total


@dataclass(frozen=True, eq=False)
class QChain:
    values: Tuple[HermitianMatrix, ...]
    increments: Tuple[HermitianMatrix, ...]
    W: Tuple[float, ...]
    V: Tuple[float, ...]
    endpoint_residual: float
    scale: float

    def is_monotone(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return all(loewner_leq(lo, hi, tol) for lo, hi in zip(self.values, self.values[1:]))

    def telescoping_residual(self) -> float:
        """Largest || Q(k) - Q(k-1) - increment_k ||_F along the chain."""
        residuals = [
            (hi - lo - inc).frobenius
            for lo, hi, inc in zip(self.values, self.values[1:], self.increments)
        ]
        return max(residuals, default=0.0)


def _partial_sums(w: WeightVector) -> Tuple[float, ...]:
    return tuple(float(x) for x in np.cumsum(w.values))


def q_chain(
    F: OperatorField, G: OperatorField, omega: WeightVector, nu: WeightVector,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> QChain:
    """
    Q(1) = (sum omega A) o (sum nu B) + (sum nu A) o (sum omega B), then
    Q(k) = Q(k-1) + q_increment(k). Q(n) is cross-checked against
    sum(omega) sum(nu A o B) + sum(nu) sum(omega A o B).
    """
    _require_pair(F, G, omega, nu)
    start = hadamard(integrate(F, omega), integrate(G, nu)) + hadamard(integrate(F, nu), integrate(G, omega))
    values = [start]
    increments = []
    for k in range(2, F.n + 1):
        increment = q_increment(k, F, G, omega, nu)
        increments.append(increment)
        values.append(values[-1] + increment)

    products = _product_field(F, G)
    target = omega.total * integrate(products, nu) + nu.total * integrate(products, omega)
    scale = max(start.frobenius, target.frobenius)
    return QChain(
        values=tuple(values),
        increments=tuple(increments),
        W=_partial_sums(omega),
        V=_partial_sums(nu),
        endpoint_residual=(values[-1] - target).frobenius,
        scale=scale,
    )


def q_chain_single(F: OperatorField, G: OperatorField, omega: WeightVector,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> QChain:
    return q_chain(F, G, omega, omega, tol)


def _mean_field(F: OperatorField, G: OperatorField, spec: MeanSpec, tol: Tolerances) -> OperatorField:
    return OperatorField(F.points, tuple(power_mean(A, B, spec, tol) for A, B in zip(F.matrices, G.matrices)))


def pointwise_mean_gap(
    A: HermitianMatrix, B: HermitianMatrix, r: float, lam: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> GapReport:
    """A o B - (A m_{r,lam} B) o (A m_{r,1-lam} B)."""
    left = power_mean(A, B, MeanSpec(r, lam), tol)
    right = power_mean(A, B, MeanSpec(r, 1.0 - lam), tol)
    return _assemble("pointwise_mean", [hadamard(A, B)], [hadamard(left, right)], tol)


def _require_increasing_positive(F: OperatorField, G: OperatorField, tol: Tolerances) -> None:
    for label, field_ in (("A", F), ("B", G)):
        certificate = check_increasing_positive(field_, tol)
        if not certificate.holds:
            s, t, smallest = certificate.worst_pair
            raise HypothesisViolation(
                f"field {label} is not positive and increasing: "
                f"worst pair ({s}, {t}) has min eigenvalue {smallest:.3e}"
            )


def gap_mean(
    F: OperatorField, G: OperatorField, alpha: WeightVector, r: float, lam: float,
    tol: Tolerances = DEFAULT_TOLERANCES, check_hypotheses: bool = True,
) -> GapReport:
    """
    sum(alpha) sum(alpha A o B) - (sum alpha A m_{r,lam} B) o (sum alpha A m_{r,1-lam} B).

    check_hypotheses=False skips the positive-increasing certificate so the
    falsifier can probe fields that violate it.
    """
    _require_pair(F, G, alpha)
    if check_hypotheses:
        _require_increasing_positive(F, G, tol)
    forward = _mean_field(F, G, MeanSpec(r, lam), tol)
    backward = _mean_field(F, G, MeanSpec(r, 1.0 - lam), tol)
    positive = [alpha.total * integrate(_product_field(F, G), alpha)]
    negative = [hadamard(integrate(forward, alpha), integrate(backward, alpha))]
    return _assemble("thm41", positive, negative, tol)


def gap_mean_two_weight(
    F: OperatorField, G: OperatorField, w: WeightVector, nu: WeightVector, r: float, lam: float,
    tol: Tolerances = DEFAULT_TOLERANCES, check_hypotheses: bool = True,
) -> GapReport:
    """
    sum(w) sum(nu A o B) - (sum w A m_{r,lam} B) o (sum nu A m_{r,1-lam} B).

    Exploratory: the single-weight argument does not cover two weights, so
    verdicts are reported and never asserted.
    """
    _require_pair(F, G, w, nu)
    if check_hypotheses:
        _require_increasing_positive(F, G, tol)
    forward = _mean_field(F, G, MeanSpec(r, lam), tol)
    backward = _mean_field(F, G, MeanSpec(r, 1.0 - lam), tol)
    positive = [w.total * integrate(_product_field(F, G), nu)]
    negative = [hadamard(integrate(forward, w), integrate(backward, nu))]
    return _assemble("thm41_two_weight", positive, negative, tol)


def _raw_integral(arrays: Sequence[np.ndarray], w: WeightVector) -> np.ndarray:
    return np.tensordot(np.asarray(w.values), np.stack(arrays), axes=1)


def example_sides(
    F: RawField, G: RawField, alpha: WeightVector, beta: WeightVector
) -> Tuple[np.ndarray, np.ndarray]:
    """Both sides of the two-weight inequality evaluated on raw (non-Hermitian) fields."""
    if F.n != G.n or F.dim != G.dim:
        raise ShapeMismatch(f"fields differ in shape: n={F.n}/{G.n}, dim={F.dim}/{G.dim}")
    for w in (alpha, beta):
        if len(w) != F.n:
            raise ShapeMismatch(f"field has {F.n} points but a weight vector has {len(w)}")
    products = [A * B for A, B in zip(F.arrays, G.arrays)]
    lhs = alpha.total * _raw_integral(products, beta) + beta.total * _raw_integral(products, alpha)
    rhs = (
        _raw_integral(F.arrays, alpha) * _raw_integral(G.arrays, beta)
        + _raw_integral(F.arrays, beta) * _raw_integral(G.arrays, alpha)
    )
    return lhs, rhs


def example_gap_raw(
    F: RawField, G: RawField, alpha: WeightVector, beta: WeightVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> GapReport:
    lhs, rhs = example_sides(F, G, alpha, beta)
    gap = hermitize(lhs - rhs, tol)
    scale = max(float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    smallest = min_eigenvalue(gap)
    return GapReport(name="example", gap=gap, min_eig=smallest, scale=scale, verdict=_verdict(smallest, scale, tol))


# Weight streams drawn per cell; stream 1 is alpha/omega/w, stream 2 is beta/nu.
_FIRST_WEIGHTS = 1
_SECOND_WEIGHTS = 2


def _cell_inputs(cell: Cell) -> Tuple[OperatorField, OperatorField, WeightVector, WeightVector]:
    F, G = get_generator(cell.generator)(cell.dim, cell.n, cell.seed)
    first = random_weights(cell.n, cell.seed, _FIRST_WEIGHTS)
    second = random_weights(cell.n, cell.seed, _SECOND_WEIGHTS)
    return F, G, first, second


def _run_thm21(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    F, G, alpha, beta = _cell_inputs(cell)
    return gap_two_weight(F, G, alpha, beta, tol)


def _run_cor22(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    F, G, omega, nu = _cell_inputs(cell)
    return gap_discrete(F, G, omega, nu, tol)


def _run_ineq15(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    F, G, alpha, _ = _cell_inputs(cell)
    return gap_single_weight(F, G, alpha, tol)


def _run_thm31(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    """
    The chain passes when every increment is PSD and both identities hold:
    Q(n) against its closed form, and Q(n) - Q(1) against the discrete gap.
    The reported gap is the increment with the smallest normalized eigenvalue.
    """
    F, G, omega, nu = _cell_inputs(cell)
    chain = q_chain(F, G, omega, nu, tol)
    pair_sum = gap_discrete(F, G, omega, nu, tol)
    residual = max(
        chain.endpoint_residual,
        chain.telescoping_residual(),
        (chain.values[-1] - chain.values[0] - pair_sum.gap).frobenius,
    )
    worst = HermitianMatrix.zeros(F.dim)
    worst_min = 0.0
    worst_ratio = math.inf
    for increment in chain.increments:
        smallest = min_eigenvalue(increment)
        ratio = smallest / max(1.0, increment.frobenius)
        if ratio < worst_ratio:
            worst, worst_min, worst_ratio = increment, smallest, ratio
    identities_hold = residual <= IDENTITY_TOL * max(1.0, chain.scale) and chain.is_monotone(tol)
    verdict = _verdict(worst_min, worst.frobenius, tol) if identities_hold else Verdict.FAIL
    return GapReport(
        name="thm31", gap=worst, min_eig=worst_min, scale=worst.frobenius, verdict=verdict,
        residual=residual, identities_hold=identities_hold,
    )


def _run_thm41(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    F, G, alpha, _ = _cell_inputs(cell)
    return gap_mean(F, G, alpha, cell.r, cell.lam, tol, check_hypotheses=check)


def _run_thm41_two_weight(cell: Cell, tol: Tolerances, check: bool) -> GapReport:
    F, G, w, nu = _cell_inputs(cell)
    return gap_mean_two_weight(F, G, w, nu, cell.r, cell.lam, tol, check_hypotheses=check)


@dataclass(frozen=True)
class InequalityInfo:
    runner: Callable[[Cell, Tolerances, bool], GapReport]
    default_generator: str
    uses_mean_grid: bool
    asserted: bool = True


INEQUALITIES: Dict[str, InequalityInfo] = {
    "thm21": InequalityInfo(_run_thm21, "scaled_pair", uses_mean_grid=False),
    "cor22": InequalityInfo(_run_cor22, "scaled_pair", uses_mean_grid=False),
    "ineq15": InequalityInfo(_run_ineq15, "scaled_pair", uses_mean_grid=False),
    "thm31": InequalityInfo(_run_thm31, "scaled_pair", uses_mean_grid=False),
    "thm41": InequalityInfo(_run_thm41, "increasing_pair", uses_mean_grid=True),
    "thm41_two_weight": InequalityInfo(_run_thm41_two_weight, "increasing_pair", uses_mean_grid=True, asserted=False),
}


def get_inequality(name: str) -> InequalityInfo:
    try:
        return INEQUALITIES[name]
    except KeyError:
        raise UnknownInequality(f"unknown inequality '{name}', expected one of {sorted(INEQUALITIES)}") from None


def run_cell(cell: Cell, tol: Tolerances = DEFAULT_TOLERANCES, check_hypotheses: bool = True) -> GapReport:
    info = get_inequality(cell.inequality)
    get_generator(cell.generator)
    if info.uses_mean_grid and (cell.r is None or cell.lam is None):
        raise ValueError(f"{cell.inequality} cells need r and lambda")
    report = info.runner(cell, tol, check_hypotheses)
    return replace(report, inputs_digest=encode_cell(cell))


def replay(digest: str, tol: Tolerances = DEFAULT_TOLERANCES) -> GapReport:
    """Recompute a cell from its digest; hypotheses were certified when the cell first ran."""
    return run_cell(decode_digest(digest), tol, check_hypotheses=False)


@dataclass(frozen=True)
class FalsificationReport:
    inequality: str
    generator: str
    trials_requested: int
    trials_run: int
    found: Optional[GapReport]
    cell: Optional[Cell] = None

    @property
    def violated(self) -> bool:
        return self.found is not None


def falsify(
    inequality: str,
    generator: str,
    trials: int,
    seed: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    dims: Sequence[int] = (1, 2, 3),
    n_points: Sequence[int] = (2, 3, 4),
    r: float = 0.0,
    lam: float = 0.5,
) -> FalsificationReport:
    """
    Search for a failing verdict on fields from `generator`, hypotheses
    unchecked. Trial i uses seed + i and cycles through dims and n_points,
    so the first trials are the cheap dim-1 cases.
    """
    info = get_inequality(inequality)
    get_generator(generator)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not dims or not n_points:
        raise ValueError("dims and n_points must be nonempty")
    for i in range(trials):
        cell = Cell(
            inequality=inequality,
            generator=generator,
            seed=seed + i,
            dim=dims[i % len(dims)],
            n=n_points[i % len(n_points)],
            r=r if info.uses_mean_grid else None,
            lam=lam if info.uses_mean_grid else None,
        )
        report = run_cell(cell, tol, check_hypotheses=False)
        if not report.passed:
            return FalsificationReport(inequality, generator, trials, i + 1, report, cell)
    return FalsificationReport(inequality, generator, trials, trials, None)
