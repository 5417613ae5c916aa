"""
Seeded random draws for generators and axiom campaigns.

The generator is numpy's PCG64 bit generator, seeded explicitly. It is
portable across platforms, so identical seeds give byte-identical campaigns.
"""
from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .hermat import HermitianMatrix

Seed = Union[int, Sequence[int]]


def make_rng(seed: Seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_square(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Complex matrix with real and imaginary parts uniform in [-1, 1]."""
    return rng.uniform(-1.0, 1.0, (dim, dim)) + 1j * rng.uniform(-1.0, 1.0, (dim, dim))


def random_hermitian(rng: np.random.Generator, dim: int) -> HermitianMatrix:
    raw = random_square(rng, dim)
    return HermitianMatrix._trusted(raw + raw.conj().T)


def random_gram(rng: np.random.Generator, dim: int) -> HermitianMatrix:
    """M* M for a random M; PSD by construction."""
    raw = random_square(rng, dim)
    return HermitianMatrix._trusted(raw.conj().T @ raw)


def random_strictly_positive(rng: np.random.Generator, dim: int, floor: float = 0.5) -> HermitianMatrix:
    return random_gram(rng, dim) + floor * HermitianMatrix.identity(dim)


def increasing_sequence(rng: np.random.Generator, n: int, start: float = 0.0) -> np.ndarray:
    """Cumulative sums of nonnegative uniform draws."""
    return start + np.cumsum(rng.uniform(0.0, 1.0, n))


def nonnegative_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, n)
