"""
Dense complex Hermitian matrices.

Carrier type for every operator value in the verifier, with:
  - a deterministic cyclic Jacobi eigensolver (fixed sweep order,
    threshold 1e-14 * ||A||_F, at most 100 sweeps),
  - functional calculus f(A) = V diag(f(lambda)) V*,
  - Loewner-order predicates under relative tolerances.

Values are immutable after construction. The constructor always symmetrizes
(M + M*)/2 and rejects inputs whose asymmetry exceeds recon_tol.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Sequence

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DomainError,
    NonSquare,
    NotNearlyHermitian,
    SingularForNegativePower,
)

JACOBI_THRESHOLD = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    psd_tol: float = 1e-8
    recon_tol: float = 1e-10
    zero_r_cutoff: float = 1e-10

    def __post_init__(self):
        for name in ("psd_tol", "recon_tol", "zero_r_cutoff"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise ValueError(f"Tolerances.{name} must be a finite nonnegative number, got {value!r}")

    def to_dict(self) -> Dict[str, float]:
        return {
            "psd_tol": self.psd_tol,
            "recon_tol": self.recon_tol,
            "zero_r_cutoff": self.zero_r_cutoff,
        }


DEFAULT_TOLERANCES = Tolerances()


def _as_square(raw: Any) -> np.ndarray:
    array = np.array(raw, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise NonSquare(f"expected a nonempty square matrix, got shape {array.shape}")
    return array


def _symmetrize_checked(array: np.ndarray, recon_tol: float) -> np.ndarray:
    asymmetry = float(np.linalg.norm(array - array.conj().T))
    limit = recon_tol * max(1.0, float(np.linalg.norm(array)))
    if asymmetry > limit:
        raise NotNearlyHermitian(
            f"asymmetry ||M - M*||_F = {asymmetry:.3e} exceeds {limit:.3e}"
        )
    return (array + array.conj().T) / 2


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    entries: np.ndarray

    # numpy scalars defer to __rmul__ instead of broadcasting over the object
    __array_ufunc__ = None

    def __post_init__(self):
        symmetric = _symmetrize_checked(_as_square(self.entries), DEFAULT_TOLERANCES.recon_tol)
        symmetric.setflags(write=False)
        object.__setattr__(self, "entries", symmetric)

    @classmethod
    def _trusted(cls, array: np.ndarray) -> "HermitianMatrix":
        # Hermitian by construction; the average only removes roundoff.
        array = np.asarray(array, dtype=complex)
        symmetric = (array + array.conj().T) / 2
        symmetric.setflags(write=False)
        obj = object.__new__(cls)
        object.__setattr__(obj, "entries", symmetric)
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls._trusted(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls._trusted(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianMatrix":
        return cls._trusted(np.diag(np.asarray(values, dtype=float)).astype(complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    @cached_property
    def spectrum(self) -> "SpectralDecomposition":
        return spectral_decompose(self)

    def _check_dim(self, other: "HermitianMatrix") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension {self.dim} does not match {other.dim}")

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check_dim(other)
        return HermitianMatrix._trusted(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check_dim(other)
        return HermitianMatrix._trusted(self.entries - other.entries)

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix._trusted(-self.entries)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        if isinstance(scalar, complex):
            if scalar.imag != 0:
                raise TypeError("only real scalars preserve Hermitian symmetry")
            scalar = scalar.real
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return HermitianMatrix._trusted(float(scalar) * self.entries)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim}, ||.||_F={self.frobenius:.4g})"

    def to_payload(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "HermitianMatrix":
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
        return cls(re + 1j * im)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> HermitianMatrix:
        return _reconstruct(self.eigenvectors, self.eigenvalues)

    def reconstruction_error(self, source: HermitianMatrix) -> float:
        return float(np.linalg.norm(self.reconstruct().entries - source.entries))


def _reconstruct(vectors: np.ndarray, values: np.ndarray) -> HermitianMatrix:
    return HermitianMatrix._trusted((vectors * values) @ vectors.conj().T)


def hermitize(raw: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> HermitianMatrix:
    """Return (raw + raw*)/2, rejecting raw whose asymmetry exceeds tol.recon_tol."""
    return HermitianMatrix._trusted(_symmetrize_checked(_as_square(raw), tol.recon_tol))


def frobenius_norm(A: HermitianMatrix) -> float:
    return A.frobenius


def _off_diagonal_norm(work: np.ndarray) -> float:
    return float(np.linalg.norm(work - np.diag(np.diag(work))))


def _rotate(work: np.ndarray, vectors: np.ndarray, p: int, q: int) -> None:
    g = work[p, q]
    magnitude = abs(g)
    if magnitude == 0.0:
        return
    phase = g / magnitude
    app = work[p, p].real
    aqq = work[q, q].real
    theta = (aqq - app) / (2.0 * magnitude)
    if abs(theta) > 1e150:
        t = 1.0 / (2.0 * theta)
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    back = phase.conjugate()

    # work <- work J, J = diag(1, e^{-i phi}) on (p, q) followed by a real rotation
    col_p = work[:, p].copy()
    col_q = work[:, q].copy()
    work[:, p] = c * col_p - s * back * col_q
    work[:, q] = s * col_p + c * back * col_q
    # work <- J* work
    row_p = work[p, :].copy()
    row_q = work[q, :].copy()
    work[p, :] = c * row_p - s * phase * row_q
    work[q, :] = s * row_p + c * phase * row_q
    work[p, q] = 0.0
    work[q, p] = 0.0
    work[p, p] = app - t * magnitude
    work[q, q] = aqq + t * magnitude

    vec_p = vectors[:, p].copy()
    vec_q = vectors[:, q].copy()
    vectors[:, p] = c * vec_p - s * back * vec_q
    vectors[:, q] = s * vec_p + c * back * vec_q


def spectral_decompose(A: HermitianMatrix) -> SpectralDecomposition:
    """Cyclic complex Jacobi eigen-decomposition with row-major pair order."""
    work = np.array(A.entries, dtype=complex)
    n = work.shape[0]
    vectors = np.eye(n, dtype=complex)
    threshold = JACOBI_THRESHOLD * float(np.linalg.norm(work))

    sweep = 0
    while _off_diagonal_norm(work) > threshold:
        if sweep == JACOBI_MAX_SWEEPS:
            raise ConvergenceFailure(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {_off_diagonal_norm(work):.3e}, threshold {threshold:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(work, vectors, p, q)
        sweep += 1

    eigenvalues = np.real(np.diag(work)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    eigenvalues.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=vectors)


def apply_function(A: HermitianMatrix, f: Callable[[float], float]) -> HermitianMatrix:
    """Gelfand calculus: V diag(f(lambda_k)) V*."""
    spectrum = A.spectrum
    values = []
    with np.errstate(all="ignore"):
        for lam in spectrum.eigenvalues:
            try:
                value = f(float(lam))
            except (ArithmeticError, ValueError) as exc:
                raise DomainError(f"function undefined at eigenvalue {lam!r}: {exc}") from exc
            if isinstance(value, (complex, np.complexfloating)):
                if value.imag != 0:
                    raise DomainError(f"function is not real at eigenvalue {lam!r}: {value!r}")
                value = value.real
            value = float(value)
            if not math.isfinite(value):
                raise DomainError(f"function is not finite at eigenvalue {lam!r}")
            values.append(value)
    return _reconstruct(spectrum.eigenvectors, np.asarray(values))


def power_psd(A: HermitianMatrix, p: float, tol: Tolerances = DEFAULT_TOLERANCES) -> HermitianMatrix:
    spectrum = A.spectrum
    scale = max(1.0, A.frobenius)
    eigenvalues = spectrum.eigenvalues
    smallest = float(eigenvalues[0])
    if p < 0:
        if smallest <= tol.psd_tol * scale:
            raise SingularForNegativePower(
                f"power {p} needs a strictly positive matrix, min eigenvalue {smallest:.3e}"
            )
        values = eigenvalues ** p
    else:
        if smallest < -tol.psd_tol * scale:
            raise DomainError(f"power {p} needs a PSD matrix, min eigenvalue {smallest:.3e}")
        values = np.maximum(eigenvalues, 0.0) ** p
    return _reconstruct(spectrum.eigenvectors, values)


def congruence(T: Any, A: HermitianMatrix) -> HermitianMatrix:
    """T* A T for a square complex T of matching dimension."""
    transform = np.asarray(T, dtype=complex)
    if transform.shape != (A.dim, A.dim):
        raise DimensionMismatch(f"transform shape {transform.shape} does not match dim {A.dim}")
    return HermitianMatrix._trusted(transform.conj().T @ A.entries @ transform)


def min_eigenvalue(A: HermitianMatrix) -> float:
    return float(A.spectrum.eigenvalues[0])


def is_psd(A: HermitianMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return min_eigenvalue(A) >= -tol.psd_tol * max(1.0, A.frobenius)


def loewner_leq(A: HermitianMatrix, B: HermitianMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """A <= B in the Loewner order, i.e. B - A is PSD."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimension {A.dim} does not match {B.dim}")
    return is_psd(B - A, tol)
