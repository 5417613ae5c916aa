"""
Hadamard (entrywise) and Kronecker (tensor) products.

The Hadamard product is always taken in the standard coordinate basis, so
A o B = (a_ij * b_ij). It is also the compression U*(A (x) B)U of the tensor
product by the diagonal embedding U e_j = e_j (x) e_j; both forms are kept so
the identity can be checked.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .hermat import HermitianMatrix

# Embedding checks stay cheap and exact up to a 64-dimensional tensor product.
MAX_KRONECKER_DIM = 8


@dataclass(frozen=True, eq=False)
class EmbeddingIsometry:
    dim: int
    matrix: np.ndarray

    def adjoint(self) -> np.ndarray:
        return self.matrix.T


def _require_same_dim(A: HermitianMatrix, B: HermitianMatrix) -> None:
    if A.dim != B.dim:
        raise DimensionMismatch(f"Hadamard product needs equal dims, got {A.dim} and {B.dim}")


def hadamard(A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    _require_same_dim(A, B)
    return HermitianMatrix._trusted(A.entries * B.entries)


def kronecker(A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    """Block matrix whose (i, j) block is A[i][j] * B."""
    return HermitianMatrix._trusted(np.kron(A.entries, B.entries))


def embedding_isometry(dim: int) -> EmbeddingIsometry:
    if dim < 1:
        raise ValueError(f"embedding dimension must be >= 1, got {dim}")
    matrix = np.zeros((dim * dim, dim))
    for j in range(dim):
        matrix[j * dim + j, j] = 1.0
    matrix.setflags(write=False)
    return EmbeddingIsometry(dim=dim, matrix=matrix)


def hadamard_via_embedding(A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    _require_same_dim(A, B)
    if A.dim > MAX_KRONECKER_DIM:
        raise DimensionMismatch(
            f"embedding form is limited to dim <= {MAX_KRONECKER_DIM}, got {A.dim}"
        )
    embedding = embedding_isometry(A.dim)
    return HermitianMatrix._trusted(embedding.adjoint() @ kronecker(A, B).entries @ embedding.matrix)
