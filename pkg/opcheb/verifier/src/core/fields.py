"""
Operator fields over finite totally ordered index sets.

A field t -> A_t is stored as n strictly increasing points with one
HermitianMatrix per point. Integrals against a measure are nonnegative
weighted sums (atomic measures), which every inequality in scope covers
exactly.

Generators produce fields that satisfy (or deliberately violate) the
hypotheses of the inequalities; the checkers certify those hypotheses.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, MonotonicityViolation, ShapeMismatch, UnknownGenerator
from .hermat import DEFAULT_TOLERANCES, HermitianMatrix, Tolerances, hermitize, is_psd, min_eigenvalue
from .products import hadamard
from .sampling import (
    increasing_sequence,
    make_rng,
    nonnegative_weights,
    random_gram,
    random_strictly_positive,
)

# Below this many points the increasing check scans every pair, so tolerance
# slack cannot leak through transitivity.
INCREASING_ALL_PAIRS_MAX = 16


def _check_points(points: Tuple[float, ...]) -> None:
    if len(points) < 1:
        raise ShapeMismatch("a field needs at least one point")
    for left, right in zip(points, points[1:]):
        if not right > left:
            raise ShapeMismatch(f"points must be strictly increasing, got {left} then {right}")


@dataclass(frozen=True, eq=False)
class OperatorField:
    points: Tuple[float, ...]
    matrices: Tuple[HermitianMatrix, ...]

    def __post_init__(self):
        points = tuple(float(p) for p in self.points)
        matrices = tuple(self.matrices)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "matrices", matrices)
        _check_points(points)
        if len(matrices) != len(points):
            raise LengthMismatch(f"{len(points)} points but {len(matrices)} matrices")
        dims = {m.dim for m in matrices}
        if len(dims) != 1:
            raise ShapeMismatch(f"field matrices must share one dim, got {sorted(dims)}")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.matrices[0].dim

    @property
    def arrays(self) -> Tuple[np.ndarray, ...]:
        return tuple(m.entries for m in self.matrices)

    def to_payload(self) -> Dict[str, object]:
        return {"points": list(self.points), "matrices": [m.to_payload() for m in self.matrices]}


@dataclass(frozen=True, eq=False)
class RawField:
    """
    Field of raw (possibly non-Hermitian) square matrices.

    Only the triangular Example uses it; PSD certification is applied to
    Hadamard products of its differences, never to the matrices themselves.
    """
    points: Tuple[float, ...]
    arrays: Tuple[np.ndarray, ...]

    def __post_init__(self):
        points = tuple(float(p) for p in self.points)
        arrays = tuple(np.array(a, dtype=complex) for a in self.arrays)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "arrays", arrays)
        _check_points(points)
        if len(arrays) != len(points):
            raise LengthMismatch(f"{len(points)} points but {len(arrays)} matrices")
        shapes = {a.shape for a in arrays}
        if len(shapes) != 1 or len(arrays[0].shape) != 2 or arrays[0].shape[0] != arrays[0].shape[1]:
            raise ShapeMismatch(f"raw field matrices must be square of one shape, got {sorted(shapes)}")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.arrays[0].shape[0]


AnyField = Union[OperatorField, RawField]


@dataclass(frozen=True)
class WeightVector:
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for v in values:
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"weights must be finite and nonnegative, got {v!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        return math.fsum(self.values)


@dataclass(frozen=True)
class FieldPairCertificate:
    """Hypothesis predicates; a predicate a checker does not evaluate is None."""
    synchronous_hadamard: Optional[bool]
    increasing: Optional[bool]
    positive: Optional[bool]
    worst_pair: Tuple[int, int, float]

    @property
    def holds(self) -> bool:
        return all(flag is not False for flag in (self.synchronous_hadamard, self.increasing, self.positive))


def integrate(F: OperatorField, w: WeightVector) -> HermitianMatrix:
    """Sum_k w_k A_{t_k}."""
    if len(w) != F.n:
        raise LengthMismatch(f"field has {F.n} points but {len(w)} weights")
    stacked = np.stack(F.arrays)
    return HermitianMatrix._trusted(np.tensordot(np.asarray(w.values), stacked, axes=1))


def hadamard_field(F: OperatorField, B: HermitianMatrix) -> OperatorField:
    """Pointwise t -> A_t o B."""
    if F.dim != B.dim:
        raise DimensionMismatch(f"field dim {F.dim} does not match {B.dim}")
    return OperatorField(F.points, tuple(hadamard(A, B) for A in F.matrices))


def check_hadamard_integral_identity(
    F: OperatorField, B: HermitianMatrix, w: WeightVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """|| integral of (A_t o B) - (integral of A_t) o B ||_F; exact up to roundoff."""
    left = integrate(hadamard_field(F, B), w)
    right = hadamard(integrate(F, w), B)
    return (left - right).frobenius


def difference_product(F: AnyField, G: AnyField, s: int, t: int, tol: Tolerances = DEFAULT_TOLERANCES) -> HermitianMatrix:
    """(A_t - A_s) o (B_t - B_s)."""
    product = (F.arrays[t] - F.arrays[s]) * (G.arrays[t] - G.arrays[s])
    return hermitize(product, tol)


def _normalized(smallest: float, matrix: HermitianMatrix) -> float:
    return smallest / max(1.0, matrix.frobenius)


def check_synchronous_hadamard(
    F: AnyField, G: AnyField, tol: Tolerances = DEFAULT_TOLERANCES
) -> FieldPairCertificate:
    if F.n != G.n or F.dim != G.dim:
        raise ShapeMismatch(f"fields differ in shape: n={F.n}/{G.n}, dim={F.dim}/{G.dim}")
    synchronous = True
    worst = (0, 0, 0.0)
    worst_ratio = math.inf
    for s, t in itertools.combinations(range(F.n), 2):
        product = difference_product(F, G, s, t, tol)
        smallest = min_eigenvalue(product)
        if not is_psd(product, tol):
            synchronous = False
        ratio = _normalized(smallest, product)
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst = (s, t, smallest)
    return FieldPairCertificate(synchronous_hadamard=synchronous, increasing=None, positive=None, worst_pair=worst)


def check_increasing_positive(F: OperatorField, tol: Tolerances = DEFAULT_TOLERANCES) -> FieldPairCertificate:
    positive = True
    increasing = True
    worst = (0, 0, min_eigenvalue(F.matrices[0]))
    worst_ratio = math.inf

    def consider(s: int, t: int, matrix: HermitianMatrix) -> bool:
        nonlocal worst, worst_ratio
        smallest = min_eigenvalue(matrix)
        ratio = _normalized(smallest, matrix)
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst = (s, t, smallest)
        return is_psd(matrix, tol)

    for k, A in enumerate(F.matrices):
        if not consider(k, k, A):
            positive = False

    if F.n <= INCREASING_ALL_PAIRS_MAX:
        pairs = itertools.combinations(range(F.n), 2)
    else:
        pairs = zip(range(F.n - 1), range(1, F.n))
    for s, t in pairs:
        if not consider(s, t, F.matrices[t] - F.matrices[s]):
            increasing = False

    return FieldPairCertificate(synchronous_hadamard=None, increasing=increasing, positive=positive, worst_pair=worst)


def _index_points(n: int) -> Tuple[float, ...]:
    return tuple(float(k) for k in range(n))


def _require_sizes(dim: int, n: int) -> None:
    if dim < 1 or n < 1:
        raise ValueError(f"generators need dim >= 1 and n >= 1, got dim={dim}, n={n}")


def gen_scaled_pair(dim: int, n: int, seed: int) -> Tuple[OperatorField, OperatorField]:
    """A_t = a(t) X, B_t = b(t) Y with a, b increasing positive and X, Y PSD."""
    _require_sizes(dim, n)
    rng = make_rng(seed)
    X = random_gram(rng, dim)
    Y = random_gram(rng, dim)
    a = increasing_sequence(rng, n, start=0.1)
    b = increasing_sequence(rng, n, start=0.1)
    points = _index_points(n)
    return (
        OperatorField(points, tuple(float(v) * X for v in a)),
        OperatorField(points, tuple(float(v) * Y for v in b)),
    )


def gen_increasing_pair(dim: int, n: int, seed: int, drift: float = 1.0) -> Tuple[OperatorField, OperatorField]:
    """A_t = A0 + g(t) C, B_t = B0 + h(t) D; drift = 0 gives constant fields."""
    _require_sizes(dim, n)
    rng = make_rng(seed)
    A0 = random_strictly_positive(rng, dim)
    B0 = random_strictly_positive(rng, dim)
    C = random_gram(rng, dim)
    D = random_gram(rng, dim)
    g = increasing_sequence(rng, n)
    h = increasing_sequence(rng, n)
    points = _index_points(n)
    return (
        OperatorField(points, tuple(A0 + (drift * float(v)) * C for v in g)),
        OperatorField(points, tuple(B0 + (drift * float(v)) * D for v in h)),
    )


def gen_nonsynchronous_pair(dim: int, n: int, seed: int) -> Tuple[OperatorField, OperatorField]:
    """A_t = a(t) X with a increasing, B_t = b(t) Y with b decreasing."""
    _require_sizes(dim, n)
    rng = make_rng(seed)
    X = random_strictly_positive(rng, dim)
    Y = random_strictly_positive(rng, dim)
    a = increasing_sequence(rng, n, start=0.1)
    b = increasing_sequence(rng, n, start=0.1)[::-1]
    points = _index_points(n)
    return (
        OperatorField(points, tuple(float(v) * X for v in a)),
        OperatorField(points, tuple(float(v) * Y for v in b)),
    )


def _same_sense(first: np.ndarray, second: np.ndarray) -> bool:
    return all(
        (first[t] - first[s]) * (second[t] - second[s]) >= 0
        for s, t in itertools.combinations(range(len(first)), 2)
    )


def gen_triangular_pair(
    f1: Sequence[float],
    g1: Sequence[float],
    h: Sequence[float],
    f2: Sequence[float],
    g2: Sequence[float],
    k: Sequence[float],
    points: Optional[Sequence[float]] = None,
    strict: bool = True,
) -> Tuple[RawField, RawField]:
    """
    A_t = [[f1, h], [0, g1]] and B_t = [[f2, 0], [k, g2]].

    With strict=True, f1 and f2 must be increasing and g1, g2 decreasing.
    strict=False only requires each diagonal slot to be monotone in the same
    sense, which is all the difference product needs.
    """
    series = [np.asarray(x, dtype=float) for x in (f1, g1, h, f2, g2, k)]
    n = len(series[0])
    if n < 1 or any(len(x) != n for x in series):
        raise LengthMismatch(f"sequences must share one nonzero length, got {[len(x) for x in series]}")
    f1, g1, h, f2, g2, k = series
    if strict:
        if np.any(np.diff(f1) < 0) or np.any(np.diff(f2) < 0):
            raise MonotonicityViolation("f1 and f2 must be increasing")
        if np.any(np.diff(g1) > 0) or np.any(np.diff(g2) > 0):
            raise MonotonicityViolation("g1 and g2 must be decreasing")
    elif not (_same_sense(f1, f2) and _same_sense(g1, g2)):
        raise MonotonicityViolation("each diagonal slot must be monotone in one sense")

    grid = tuple(points) if points is not None else _index_points(n)
    A = tuple(np.array([[f1[i], h[i]], [0.0, g1[i]]]) for i in range(n))
    B = tuple(np.array([[f2[i], 0.0], [k[i], g2[i]]]) for i in range(n))
    return RawField(grid, A), RawField(grid, B)


GeneratorFn = Callable[[int, int, int], Tuple[OperatorField, OperatorField]]

GENERATORS: Dict[str, GeneratorFn] = {
    "scaled_pair": gen_scaled_pair,
    "increasing_pair": gen_increasing_pair,
    "nonsynchronous_pair": gen_nonsynchronous_pair,
}


def get_generator(name: str) -> GeneratorFn:
    try:
        return GENERATORS[name]
    except KeyError:
        raise UnknownGenerator(f"unknown generator '{name}', expected one of {sorted(GENERATORS)}") from None


def random_weights(n: int, seed: int, stream: int = 1) -> WeightVector:
    """Nonnegative weights drawn from a stream independent of the field draws."""
    return WeightVector(tuple(nonnegative_weights(make_rng([seed, stream]), n)))
