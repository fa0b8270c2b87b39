"""Reduced space V_n kept as an a-orthonormal basis.

Extending a basis a-orthonormalizes the new vector against the old ones
(Gram-Schmidt with one reorthogonalization pass). If nothing of the new
vector survives, :class:`ExtensionError` is raised.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from locred.base.exceptions import ConfigError, ExtensionError
from locred.fem.linalg import DofVector, SparseSpdMatrix

EXTENSION_TOL = 1e-10


class _ColumnBuffer:
    """Preallocated column storage shared by a chain of bases.

    A basis of dimension n owns the first n columns. Appending writes in place
    only when the basis is the longest one on this buffer, otherwise it copies.
    """

    def __init__(self, n_rows: int, capacity: int):
        self.vectors = np.zeros((n_rows, capacity), order="F")
        self.applied = np.zeros((n_rows, capacity), order="F")
        self.used = 0

    @property
    def capacity(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    _buffer: _ColumnBuffer
    dim: int

    @classmethod
    def empty(cls, n_dofs: int, capacity: int = 16) -> "ReducedBasis":
        return cls(_ColumnBuffer(n_dofs, max(capacity, 1)), 0)

    @property
    def n_dofs(self) -> int:
        return self._buffer.vectors.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        """Basis vectors as columns, shape (n_dofs, dim)."""
        return self._buffer.vectors[:, :self.dim]

    @property
    def applied(self) -> np.ndarray:
        """A times the basis vectors, shape (n_dofs, dim)."""
        return self._buffer.applied[:, :self.dim]

    def __len__(self):
        return self.dim

    def gram(self, A: SparseSpdMatrix) -> np.ndarray:
        V = self.vectors
        return V.T @ (A.csr @ V)

    def gram_deviation(self, A: SparseSpdMatrix) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.gram(A) - np.eye(self.dim))))

    def orthonormalize(self, v: DofVector, A: SparseSpdMatrix, tol: float = EXTENSION_TOL) -> Tuple[DofVector, DofVector]:
        """a-orthonormal complement of ``v`` against the basis, and A applied to it."""
        if v.shape[0] != self.n_dofs:
            raise ConfigError(f"vector of length {v.shape[0]} does not fit basis over {self.n_dofs} DOFs")
        v = np.array(v, dtype=float)
        initial = np.sqrt(max(v @ (A.csr @ v), 0.0))
        if initial == 0:
            raise ExtensionError("enrichment vector is zero")
        if self.dim:
            V, AV = self.vectors, self.applied
            for _ in range(2):
                v -= V @ (AV.T @ v)
        Av = A.csr @ v
        norm = np.sqrt(max(v @ Av, 0.0))
        if norm <= tol * initial:
            raise ExtensionError(f"enrichment vector lies in the reduced space (remaining fraction {norm / initial:.3e})")
        return v / norm, Av / norm

    def extend(self, v: DofVector, A: SparseSpdMatrix, tol: float = EXTENSION_TOL) -> "ReducedBasis":
        q, Aq = self.orthonormalize(v, A, tol)
        buffer = self._buffer
        if buffer.used != self.dim or buffer.capacity == self.dim:
            grown = _ColumnBuffer(self.n_dofs, max(2 * self.dim, 16))
            grown.vectors[:, :self.dim] = self.vectors
            grown.applied[:, :self.dim] = self.applied
            grown.used = self.dim
            buffer = grown
        buffer.vectors[:, self.dim] = q
        buffer.applied[:, self.dim] = Aq
        buffer.used = self.dim + 1
        return ReducedBasis(buffer, self.dim + 1)


def reduced_solve(basis: ReducedBasis, A: SparseSpdMatrix, b: DofVector) -> DofVector:
    """Galerkin solution in span(basis); with an a-orthonormal basis the coefficients are V^T b."""
    if b.shape[0] != A.dimension or basis.n_dofs != A.dimension:
        raise ConfigError("basis, operator and load vector dimensions differ")
    if basis.dim == 0:
        return np.zeros_like(b, dtype=float)
    V = basis.vectors
    return V @ (V.T @ b)
