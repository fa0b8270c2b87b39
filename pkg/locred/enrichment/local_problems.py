import logging
from concurrent.futures import Executor
from typing import List, Optional, Tuple

import numpy as np

from locred.base.exceptions import SolverError
from locred.decomposition.subdomains import DomainDecomposition, Subdomain
from locred.enrichment.reduced_basis import ReducedBasis
from locred.fem.linalg import DofVector, SparseSpdMatrix, SpdFactor, factorize_spd, solve_psd

logger = logging.getLogger(__name__)

NEGATIVE_DUAL_TOL = 1e-14
SCHUR_RCOND = 1e-12


def parallel_map(executor: Optional[Executor], fn, items) -> list:
    """Index-ordered map; results do not depend on the schedule."""
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def local_factor(sub: Subdomain, A: SparseSpdMatrix) -> SpdFactor:
    """Factorization of the principal submatrix A_kk of a subdomain."""
    return factorize_spd(A.principal(sub.interior_dofs))


def local_solvers(dd: DomainDecomposition, A: SparseSpdMatrix, executor: Optional[Executor] = None) -> List[SpdFactor]:
    factors = parallel_map(executor, lambda sub: local_factor(sub, A), list(dd))
    logger.info(f"factorized {len(factors)} local problems")
    return factors


def local_riesz_coefficients(residual: DofVector, sub: Subdomain, factor: SpdFactor) -> Tuple[np.ndarray, float]:
    """Local coefficients of the Riesz representative of R on O_k and the dual norm."""
    r = residual[sub.interior_dofs]
    w = factor.solve(r)
    value = float(r @ w)
    if value < -NEGATIVE_DUAL_TOL * max(1.0, float(r @ r)):
        raise SolverError(f"negative squared dual norm {value:.3e} on subdomain {sub.index}")
    return w, float(np.sqrt(max(value, 0.0)))


def local_riesz(residual: DofVector, sub: Subdomain, A: SparseSpdMatrix,
                factor: Optional[SpdFactor] = None) -> Tuple[DofVector, float]:
    """Find w in O_k with a(w, phi) = R(phi) for all phi in O_k; returns (w, ||R||_{O_k'})."""
    factor = factor or local_factor(sub, A)
    w, dual_norm = local_riesz_coefficients(residual, sub, factor)
    rep = np.zeros(A.dimension)
    rep[sub.interior_dofs] = w
    return rep, dual_norm


def solve_coupled(basis: ReducedBasis, sub: Subdomain, A: SparseSpdMatrix, b: DofVector,
                  factor: Optional[SpdFactor] = None) -> DofVector:
    """Galerkin solution on span(basis) + O_i.

    The generating set may be linearly dependent. The block Gram system
    [[I, C], [C^T, A_ii]] is eliminated onto the basis block, leaving the small
    positive semidefinite Schur complement I - C A_ii^{-1} C^T, which is solved
    for any of its (consistent) solutions.
    """
    factor = factor or local_factor(sub, A)
    idx = sub.interior_dofs
    y0 = factor.solve(b[idx])
    u_e = np.zeros(A.dimension)
    if basis.dim == 0:
        u_e[idx] = y0
        return u_e

    V = basis.vectors
    C_T = basis.applied[idx, :]  # a(v_p, phi_j)
    Z = factor.solve(C_T)
    schur = np.eye(basis.dim) - C_T.T @ Z
    rhs = V.T @ b - C_T.T @ y0
    # 0 <= schur <= I; directions below the rounding level of the local solves count as kernel
    alpha = solve_psd(schur, rhs, rcond=SCHUR_RCOND, scale=1.0)
    u_e += V @ alpha
    u_e[idx] += y0 - Z @ alpha
    return u_e
