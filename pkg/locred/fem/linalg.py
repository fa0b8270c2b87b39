import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.sparse as sps
from scipy.sparse.linalg import splu

from locred.base.exceptions import ConfigError, SolverError

logger = logging.getLogger(__name__)

DofVector = npt.NDArray[np.float64]

SOLVE_RTOL = 1e-12
# a solve fails when its relative residual exceeds this multiple of the rounding floor
# eps * || |A| |x| || / ||b|| (and the target rtol)
ROUNDING_SAFETY = 1e2
MAX_REFINEMENTS = 4
# largest singular system handed to the dense semidefinite fallback
DENSE_FALLBACK_LIMIT = 3000


@dataclass(frozen=True, eq=False)
class SparseSpdMatrix:
    """Symmetric positive (semi)definite operator over the free DOFs, stored as CSR."""

    csr: sps.csr_matrix

    def __post_init__(self):
        csr = sps.csr_matrix(self.csr, dtype=float)
        if csr.shape[0] != csr.shape[1]:
            raise ConfigError(f"operator must be square, got shape {csr.shape}")
        csr.sort_indices()
        object.__setattr__(self, "csr", csr)

    @property
    def dimension(self) -> int:
        return self.csr.shape[0]

    @cached_property
    def magnitude(self) -> sps.csr_matrix:
        """Entrywise |A|."""
        return abs(self.csr)

    def diagonal(self) -> np.ndarray:
        return self.csr.diagonal()

    def asymmetry(self) -> float:
        diff = self.csr - self.csr.T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def principal(self, index: np.ndarray) -> "SparseSpdMatrix":
        """Principal submatrix on ``index`` (local problem on a subdomain)."""
        return SparseSpdMatrix(self.csr[index][:, index])


def _check_dims(A: SparseSpdMatrix, *vectors: np.ndarray):
    for v in vectors:
        if v.shape[0] != A.dimension:
            raise ConfigError(f"vector of length {v.shape[0]} does not match operator dimension {A.dimension}")


def energy_inner(A: SparseSpdMatrix, u: DofVector, v: DofVector) -> float:
    _check_dims(A, u, v)
    return float(u @ (A.csr @ v))


def energy_norm(A: SparseSpdMatrix, v: DofVector) -> float:
    return float(np.sqrt(max(energy_inner(A, v, v), 0.0)))


def rounding_floor(A: SparseSpdMatrix, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Relative residual eps * || |A| |x| || / ||b|| that rounding alone can produce, per column."""
    b_norm = np.linalg.norm(b, axis=0)
    spread = np.linalg.norm(A.magnitude @ np.abs(x), axis=0)
    return np.finfo(float).eps * spread / np.where(b_norm > 0, b_norm, 1.0)


def solve_psd(S: np.ndarray, g: np.ndarray, rcond: float = 1e-13, scale: float = 0.0) -> np.ndarray:
    """Any solution of a consistent dense symmetric positive semidefinite system.

    Eigen-directions below ``rcond * max(largest eigenvalue, scale)`` are treated
    as the kernel, which returns the minimum norm solution. ``scale`` gives the
    magnitude of S when it is known a priori (a Schur complement bounded by I).
    """
    S = 0.5 * (S + S.T)
    if S.size == 0:
        return np.zeros_like(g)
    w, Q = scipy.linalg.eigh(S)
    reference = max(w[-1], scale)
    if reference <= 0:
        return np.zeros_like(g)
    if np.any(w < -1e-8 * reference):
        raise SolverError(f"system is indefinite (smallest eigenvalue {w[0]:.3e}, largest {w[-1]:.3e})")
    keep = w > rcond * reference
    coeffs = (Q[:, keep].T @ g)
    coeffs = (coeffs.T / w[keep]).T
    return Q[:, keep] @ coeffs


class SpdFactor:
    """Sparse LU factorization of an SPD matrix with residual-checked solves.

    Solves refine iteratively until the relative residual reaches ``rtol``.
    A singular (semidefinite) matrix small enough is handled by the dense
    semidefinite fallback.
    """

    def __init__(self, A: SparseSpdMatrix, rtol: float = SOLVE_RTOL):
        self.A = A
        self.rtol = rtol
        self.logger = logging.getLogger(self.__class__.__name__)
        self._lu = None
        self._dense = None
        if A.dimension == 0:
            return
        try:
            self._lu = splu(A.csr.tocsc(), permc_spec="MMD_AT_PLUS_A")
        except RuntimeError as e:
            if A.dimension > DENSE_FALLBACK_LIMIT:
                raise SolverError(f"factorization failed for dimension {A.dimension}: {e}") from e
            self.logger.debug(f"LU failed ({e}), using dense semidefinite solve")
            self._dense = A.csr.toarray()

    def _raw_solve(self, b: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self._lu.solve(b)
        return solve_psd(self._dense, b)

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.A.dimension:
            raise ConfigError(f"right hand side of length {b.shape[0]} does not match dimension {self.A.dimension}")
        if self.A.dimension == 0 or b.size == 0:
            return np.zeros_like(b)
        if b.ndim == 2:
            if self._lu is None:
                return np.column_stack([self.solve(b[:, j]) for j in range(b.shape[1])])
            return self._solve_block(b)

        b_norm = np.linalg.norm(b)
        if b_norm == 0:
            return np.zeros_like(b)
        x = self._raw_solve(b)
        if not np.all(np.isfinite(x)):
            raise SolverError("solve produced non-finite values")
        rel = np.linalg.norm(b - self.A.csr @ x) / b_norm
        for _ in range(MAX_REFINEMENTS):
            if rel <= self.rtol:
                break
            x_new = x + self._raw_solve(b - self.A.csr @ x)
            rel_new = np.linalg.norm(b - self.A.csr @ x_new) / b_norm
            if rel_new >= rel:
                break
            x, rel = x_new, rel_new
        limit = self.failure_limit(x, b)
        if rel > limit:
            raise SolverError(f"relative residual {rel:.3e} exceeds {limit:.3e}")
        if rel > self.rtol:
            self.logger.debug(f"relative residual {rel:.3e} above target {self.rtol:.0e}")
        if b @ x < -1e-10 * b_norm * np.linalg.norm(x):
            raise SolverError("operator is not positive definite (b.x < 0)")
        return x

    def _solve_block(self, B: np.ndarray) -> np.ndarray:
        X = self._lu.solve(B)
        R = B - self.A.csr @ X
        norms = np.linalg.norm(B, axis=0)
        scale = np.where(norms > 0, norms, 1.0)
        for _ in range(MAX_REFINEMENTS):
            if np.all(np.linalg.norm(R, axis=0) / scale <= self.rtol):
                break
            X = X + self._lu.solve(R)
            R = B - self.A.csr @ X
        rel = np.linalg.norm(R, axis=0) / scale
        limit = self.failure_limit(X, B)
        if np.any(rel > limit):
            j = int(np.argmax(rel - limit))
            raise SolverError(f"relative residual {rel[j]:.3e} of column {j} exceeds {limit[j]:.3e}")
        return X

    def failure_limit(self, x: np.ndarray, b: np.ndarray):
        """Largest accepted relative residual: the target or a multiple of the rounding floor."""
        return np.maximum(self.rtol, ROUNDING_SAFETY * rounding_floor(self.A, x, b))


def factorize_spd(A: SparseSpdMatrix, rtol: float = SOLVE_RTOL) -> SpdFactor:
    return SpdFactor(A, rtol=rtol)


def solve_spd(A: SparseSpdMatrix, b: DofVector, rtol: float = SOLVE_RTOL) -> DofVector:
    return factorize_spd(A, rtol=rtol).solve(b)


def reference_solve(A: SparseSpdMatrix, b: DofVector, factor: Optional[SpdFactor] = None) -> DofVector:
    """Truth solution of a(u, phi) = f(phi) over all free DOFs."""
    factor = factor or factorize_spd(A)
    u = factor.solve(b)
    logger.info(f"reference solution: {A.dimension} DOFs, energy norm {energy_norm(A, u):.6e}")
    return u
