"""
Power-mean interpolational paths m_{r,t} of strictly positive matrices.

    A m_{r,t} B = A^{1/2} F_{r,t}(A^{-1/2} B A^{-1/2}) A^{1/2}
    F_{r,t}(x)  = (1 - t + t x^r)^{1/r}

t weights B: m_{1,t} is (1-t)A + tB, m_{-1,t} the weighted harmonic mean and
|r| < zero_r_cutoff routes to the weighted geometric mean A #_t B.

Axiom checkers draw seeded random inputs and return failures as data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Literal, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, NonpositiveArgument, NotStrictlyPositive
from .hermat import (
    DEFAULT_TOLERANCES,
    HermitianMatrix,
    Tolerances,
    apply_function,
    congruence,
    frobenius_norm,
    is_psd,
    min_eigenvalue,
    power_psd,
)
from .sampling import make_rng, random_gram, random_square, random_strictly_positive

DEFAULT_REGULARIZATION = 1e-8
# Pass as regularize_eps to shift each operand by default_eps of itself.
DEFAULT_EPS = "default"

Regularization = Union[float, Literal["default"], None]

SINGULAR_TRANSFORM_EVERY = 4


@dataclass(frozen=True)
class MeanSpec:
    r: float
    t: float

    def __post_init__(self):
        if not -1.0 <= self.r <= 1.0:
            raise DomainError(f"power exponent r must lie in [-1, 1], got {self.r}")
        if not 0.0 <= self.t <= 1.0:
            raise DomainError(f"path parameter t must lie in [0, 1], got {self.t}")


def representing_function(r: float, t: float, x: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """F_{r,t}(x) = 1 m_{r,t} x."""
    if not x > 0:
        raise NonpositiveArgument(f"representing function needs x > 0, got {x!r}")
    if abs(r) < tol.zero_r_cutoff:
        return x ** t
    # (1 - t + t x^r)^{1/r} written with expm1/log1p so small |r| stays accurate
    return math.exp(math.log1p(t * math.expm1(r * math.log(x))) / r)


def regularize(A: HermitianMatrix, eps: float) -> HermitianMatrix:
    """A + eps I."""
    if not eps > 0:
        raise DomainError(f"regularization eps must be positive, got {eps!r}")
    return A + eps * HermitianMatrix.identity(A.dim)


def default_eps(A: HermitianMatrix) -> float:
    """1e-8 * max(1, ||A||_F)."""
    return DEFAULT_REGULARIZATION * max(1.0, A.frobenius)


def _require_strictly_positive(A: HermitianMatrix, label: str, tol: Tolerances) -> None:
    smallest = min_eigenvalue(A)
    if smallest <= tol.psd_tol * max(1.0, A.frobenius):
        raise NotStrictlyPositive(
            f"{label} must be strictly positive, min eigenvalue {smallest:.3e}; "
            "regularize explicitly to take the limit"
        )


def power_mean(
    A: HermitianMatrix,
    B: HermitianMatrix,
    spec: MeanSpec,
    tol: Tolerances = DEFAULT_TOLERANCES,
    regularize_eps: Regularization = None,
) -> HermitianMatrix:
    if A.dim != B.dim:
        raise DimensionMismatch(f"mean operands have dims {A.dim} and {B.dim}")
    if regularize_eps is not None:
        # A regularized operand carries its own eps shift; only its sign is gated.
        tol = replace(tol, psd_tol=0.0)
    if regularize_eps == DEFAULT_EPS:
        A = regularize(A, default_eps(A))
        B = regularize(B, default_eps(B))
    elif regularize_eps is not None:
        A = regularize(A, regularize_eps)
        B = regularize(B, regularize_eps)
    _require_strictly_positive(A, "A", tol)
    _require_strictly_positive(B, "B", tol)

    root = power_psd(A, 0.5, tol)
    inverse_root = power_psd(A, -0.5, tol)
    inner = congruence(inverse_root.entries, B)
    path_value = apply_function(inner, lambda x: representing_function(spec.r, spec.t, x, tol))
    return congruence(root.entries, path_value)


def arithmetic_mean(A: HermitianMatrix, B: HermitianMatrix, t: float) -> HermitianMatrix:
    return (1.0 - t) * A + t * B


def harmonic_mean(
    A: HermitianMatrix, B: HermitianMatrix, t: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> HermitianMatrix:
    combined = (1.0 - t) * power_psd(A, -1.0, tol) + t * power_psd(B, -1.0, tol)
    return power_psd(combined, -1.0, tol)


def geometric_mean(
    A: HermitianMatrix, B: HermitianMatrix, t: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> HermitianMatrix:
    root = power_psd(A, 0.5, tol)
    inner = congruence(power_psd(A, -0.5, tol).entries, B)
    return congruence(root.entries, power_psd(inner, t, tol))


@dataclass
class AxiomFailure:
    trial: int
    axiom: str
    min_eig: float
    inputs: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"trial": self.trial, "axiom": self.axiom, "min_eig": self.min_eig, "inputs": self.inputs}


@dataclass
class AxiomReport:
    spec: MeanSpec
    trials: int
    dim: int
    seed: int
    worst_min_eig: float = 0.0
    worst_scale: float = 1.0
    failures: List[AxiomFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, trial: int, axiom: str, margin: HermitianMatrix, inputs: Dict[str, Any],
               tol: Tolerances) -> None:
        smallest = min_eigenvalue(margin)
        scale = max(1.0, margin.frobenius)
        if smallest / scale < self.worst_min_eig / self.worst_scale:
            self.worst_min_eig = smallest
            self.worst_scale = scale
        if not is_psd(margin, tol):
            self.failures.append(AxiomFailure(trial=trial, axiom=axiom, min_eig=smallest, inputs=inputs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.spec.r,
            "t": self.spec.t,
            "trials": self.trials,
            "dim": self.dim,
            "seed": self.seed,
            "worst_min_eig": self.worst_min_eig,
            "passed": self.passed,
            "failures": [f.to_dict() for f in self.failures],
        }


def _transform_payload(transform: np.ndarray) -> Dict[str, Any]:
    return {"dim": transform.shape[0], "re": transform.real.tolist(), "im": transform.imag.tolist()}


def check_mean_axioms(
    spec: MeanSpec,
    trials: int,
    dim: int,
    seed: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AxiomReport:
    """
    Randomized check of joint monotonicity, the transformer inequality and
    normalization for m_{r,t}.

    Each trial draws strictly positive A, B, increments C = A + P, D = B + Q
    with P, Q PSD, and a random transform T. Every fourth T has a zero last
    column; when T*AT or T*BT is singular the right side is taken as the
    default-eps regularized limit, which bounds the limit from above.
    """
    if trials < 1 or dim < 1:
        raise ValueError(f"trials and dim must be >= 1, got trials={trials}, dim={dim}")
    rng = make_rng(seed)
    report = AxiomReport(spec=spec, trials=trials, dim=dim, seed=seed)
    identity = HermitianMatrix.identity(dim)

    def mean(X: HermitianMatrix, Y: HermitianMatrix) -> HermitianMatrix:
        return power_mean(X, Y, spec, tol)

    for trial in range(trials):
        A = random_strictly_positive(rng, dim)
        B = random_strictly_positive(rng, dim)
        C = A + 0.5 * random_gram(rng, dim)
        D = B + 0.5 * random_gram(rng, dim)
        transform = random_square(rng, dim) + 2.0 * np.eye(dim)
        if trial % SINGULAR_TRANSFORM_EVERY == SINGULAR_TRANSFORM_EVERY - 1:
            transform[:, -1] = 0.0

        report.record(
            trial, "monotonicity", mean(C, D) - mean(A, B),
            {name: X.to_payload() for name, X in (("A", A), ("B", B), ("C", C), ("D", D))}, tol,
        )

        lhs = congruence(transform, mean(A, B))
        TA, TB = congruence(transform, A), congruence(transform, B)
        regularized = False
        try:
            rhs = mean(TA, TB)
        except NotStrictlyPositive:
            rhs = power_mean(TA, TB, spec, tol, regularize_eps=DEFAULT_EPS)
            regularized = True
        report.record(
            trial, "transformer", rhs - lhs,
            {"A": A.to_payload(), "B": B.to_payload(), "T": _transform_payload(transform),
             "regularized": regularized}, tol,
        )

        unit = mean(identity, identity)
        report.record(trial, "normalization", unit - identity, {}, tol)
        report.record(trial, "normalization", identity - unit, {}, tol)

    return report


def check_path_identity(
    r: float,
    p: float,
    q: float,
    s: float,
    A: HermitianMatrix,
    B: HermitianMatrix,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """|| (A m_p B) m_s (A m_q B) - A m_{(1-s)p + sq} B ||_F."""
    for name, value in (("p", p), ("q", q), ("s", s)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    left = power_mean(A, B, MeanSpec(r, p), tol)
    right = power_mean(A, B, MeanSpec(r, q), tol)
    combined = power_mean(left, right, MeanSpec(r, s), tol)
    target = power_mean(A, B, MeanSpec(r, (1.0 - s) * p + s * q), tol)
    return frobenius_norm(combined - target)


@dataclass(frozen=True)
class PathAxiomResiduals:
    start: float
    end: float
    symmetry: float


def check_path_axioms(
    A: HermitianMatrix, B: HermitianMatrix, r: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> PathAxiomResiduals:
    """Endpoint residuals and midpoint symmetry of the path m_{r,.}."""
    start = frobenius_norm(power_mean(A, B, MeanSpec(r, 0.0), tol) - A)
    end = frobenius_norm(power_mean(A, B, MeanSpec(r, 1.0), tol) - B)
    forward = power_mean(A, B, MeanSpec(r, 0.5), tol)
    backward = power_mean(B, A, MeanSpec(r, 0.5), tol)
    return PathAxiomResiduals(start=start, end=end, symmetry=frobenius_norm(forward - backward))
