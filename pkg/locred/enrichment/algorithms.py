"""Residual based and globally coupled online enrichment.

Both iterations start from the zero space and add one function per step,
taken from the local space O_k that maximizes the selection criterion:
the local dual norm of the residual, or the shift of the solution when
coupling the reduced space with the full local space.
"""
import logging
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from locred.base.exceptions import ExtensionError
from locred.decomposition.constants import TheoryConstants
from locred.decomposition.subdomains import DomainDecomposition
from locred.diagnostics.records import EnrichmentTrace, IterationRecord, compute_record
from locred.enrichment.local_problems import (
    local_riesz_coefficients,
    local_solvers,
    parallel_map,
    solve_coupled,
)
from locred.enrichment.reduced_basis import ReducedBasis, reduced_solve
from locred.enrichment.state import (
    Algorithm,
    EnrichmentState,
    RunStatus,
    StepReport,
    StepStatus,
    StoppingRule,
)
from locred.fem.fields import CoefficientField, SourceField
from locred.fem.linalg import DofVector, SparseSpdMatrix, SpdFactor, energy_norm
from locred.fem.mesh import TriMesh
from locred.fem.problem import DiscreteProblem, discretize

logger = logging.getLogger(__name__)


def initial_state(A: SparseSpdMatrix, b: DofVector, capacity: int = 16) -> EnrichmentState:
    """V_0 = span{0}, u_0 = 0, R_0 = f."""
    return EnrichmentState(basis=ReducedBasis.empty(A.dimension, capacity),
                           u_tilde=np.zeros(A.dimension), residual=np.array(b, dtype=float), iteration=0)


def state_from_basis(basis: ReducedBasis, A: SparseSpdMatrix, b: DofVector, iteration: int) -> EnrichmentState:
    u_tilde = reduced_solve(basis, A, b)
    return EnrichmentState(basis=basis, u_tilde=u_tilde, residual=b - A.csr @ u_tilde, iteration=iteration)


def enrich_with(state: EnrichmentState, psi: DofVector, A: SparseSpdMatrix, b: DofVector) -> EnrichmentState:
    """State after adding an arbitrary function to the reduced space (raises ExtensionError)."""
    return state_from_basis(state.basis.extend(psi, A), A, b, state.iteration + 1)


def _solvers(dd: DomainDecomposition, A: SparseSpdMatrix, solvers: Optional[Sequence[SpdFactor]],
             executor: Optional[Executor]) -> Sequence[SpdFactor]:
    return solvers if solvers is not None else local_solvers(dd, A, executor)


def local_dual_norms(residual: DofVector, dd: DomainDecomposition, A: SparseSpdMatrix,
                     solvers: Optional[Sequence[SpdFactor]] = None,
                     executor: Optional[Executor] = None) -> Tuple[List[np.ndarray], np.ndarray]:
    """Local Riesz coefficients and ||R||_{O_i'} for every subdomain."""
    solvers = _solvers(dd, A, solvers, executor)
    results = parallel_map(executor, lambda i: local_riesz_coefficients(residual, dd[i], solvers[i]),
                           range(dd.N_D))
    return [w for w, _ in results], np.array([d for _, d in results])


def step_residual_based(state: EnrichmentState, dd: DomainDecomposition, A: SparseSpdMatrix, b: DofVector, *,
                        solvers: Optional[Sequence[SpdFactor]] = None, executor: Optional[Executor] = None,
                        tol_abs: float = 0.0) -> Tuple[EnrichmentState, StepReport]:
    coefficients, duals = local_dual_norms(state.residual, dd, A, solvers, executor)
    k = int(np.argmax(duals))
    stopping_value = float(duals[k])
    if stopping_value <= tol_abs:
        return state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.BELOW_TOLERANCE,
                                 local_dual_norms=duals)

    idx = dd[k].interior_dofs
    u_hat = np.zeros(A.dimension)
    u_hat[idx] = coefficients[k]
    residual_value = float(state.residual[idx] @ coefficients[k])
    energy = float(u_hat @ (A.csr @ u_hat))
    riesz_defect = abs(residual_value - energy) / max(duals[k] ** 2, 1e-300)

    try:
        new_state = enrich_with(state, u_hat, A, b)
    except ExtensionError as e:
        logger.warning(f"iteration {state.iteration}: enrichment from subdomain {k} rejected: {e}")
        return state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.STAGNATED,
                                 local_dual_norms=duals, enrichment_vector=u_hat, riesz_defect=riesz_defect)
    return new_state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.ENRICHED,
                                 local_dual_norms=duals, enrichment_vector=u_hat, riesz_defect=riesz_defect)


def coupled_solutions(state: EnrichmentState, dd: DomainDecomposition, A: SparseSpdMatrix, b: DofVector,
                      solvers: Optional[Sequence[SpdFactor]] = None,
                      executor: Optional[Executor] = None) -> Tuple[List[DofVector], np.ndarray]:
    """u_e^(i) on V_n + O_i for every subdomain and the shifts ||u_n - u_e^(i)||_a."""
    solvers = _solvers(dd, A, solvers, executor)

    def solve(i):
        u_e = solve_coupled(state.basis, dd[i], A, b, solvers[i])
        return u_e, energy_norm(A, u_e - state.u_tilde)

    results = parallel_map(executor, solve, range(dd.N_D))
    return [u for u, _ in results], np.array([s for _, s in results])


def step_globally_coupled(state: EnrichmentState, dd: DomainDecomposition, A: SparseSpdMatrix, b: DofVector, *,
                          solvers: Optional[Sequence[SpdFactor]] = None, executor: Optional[Executor] = None,
                          tol_abs: float = 0.0, with_dual_norms: bool = False) -> Tuple[EnrichmentState, StepReport]:
    solvers = _solvers(dd, A, solvers, executor)
    solutions, shifts = coupled_solutions(state, dd, A, b, solvers, executor)
    duals = local_dual_norms(state.residual, dd, A, solvers, executor)[1] if with_dual_norms else None
    k = int(np.argmax(shifts))
    stopping_value = float(shifts[k])
    if stopping_value <= tol_abs:
        return state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.BELOW_TOLERANCE,
                                 local_dual_norms=duals, shifts=shifts)

    u_e = solutions[k]
    # u_n lies in V_n, so adding the shift spans the same space as adding u_e^(k)
    try:
        new_state = enrich_with(state, u_e - state.u_tilde, A, b)
    except ExtensionError as e:
        logger.warning(f"iteration {state.iteration}: coupled enrichment from subdomain {k} rejected: {e}")
        return state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.STAGNATED,
                                 local_dual_norms=duals, shifts=shifts, enrichment_vector=u_e)
    return new_state, StepReport(selected_k=k, stopping_value=stopping_value, status=StepStatus.ENRICHED,
                                 local_dual_norms=duals, shifts=shifts, enrichment_vector=u_e)


def run(algorithm: Algorithm, mesh: TriMesh, kappa: CoefficientField, f: SourceField, dd: DomainDecomposition,
        stop: StoppingRule, *, problem: Optional[DiscreteProblem] = None, theory: Optional[TheoryConstants] = None,
        threads: int = 1, coupled_dual_norms: bool = True,
        config: Optional[Dict[str, Any]] = None) -> EnrichmentTrace:
    """Iterate the chosen enrichment until a stopping rule fires and return the full trace."""
    algorithm = Algorithm(algorithm)
    problem = problem or discretize(mesh, kappa, f)
    A, b, u = problem.A, problem.b, problem.u
    reference_energy = energy_norm(A, u)
    cpu_sq = theory.cpu_sq_bound if theory is not None else None

    def rel(error: float) -> float:
        return error / reference_energy if reference_energy > 0 else 0.0

    def converged(error: float) -> bool:
        return stop.tol_rel is not None and rel(error) <= stop.tol_rel

    records: List[IterationRecord] = []
    state = initial_state(A, b, capacity=min(max(stop.max_iter, 1), 64))
    error = reference_energy
    status = None
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else nullcontext(None)
    with pool as executor:
        solvers = local_solvers(dd, A, executor)
        for _ in range(stop.max_iter):
            if converged(error):
                status = RunStatus.CONVERGED
                break
            if algorithm is Algorithm.RESIDUAL_BASED:
                new_state, report = step_residual_based(state, dd, A, b, solvers=solvers, executor=executor,
                                                        tol_abs=stop.tol_abs)
            else:
                new_state, report = step_globally_coupled(state, dd, A, b, solvers=solvers, executor=executor,
                                                          tol_abs=stop.tol_abs, with_dual_norms=coupled_dual_norms)
            if report.status is StepStatus.BELOW_TOLERANCE:
                status = RunStatus.CONVERGED
                break
            if report.status is StepStatus.STAGNATED:
                status = RunStatus.STAGNATED
                break
            record = compute_record(error, new_state, report, u, A, cpu_sq=cpu_sq, reference_energy=reference_energy)
            records.append(record)
            logger.info(f"{algorithm.value} n={record.n}: k={record.selected_k}, "
                        f"criterion={record.stopping_value:.6e}, rel error {rel(record.next_energy_error):.6e}")
            state, error = new_state, record.next_energy_error
        else:
            status = RunStatus.CONVERGED if converged(error) else RunStatus.MAX_ITER

    logger.info(f"{algorithm.value} finished: {status.value} after {len(records)} iterations, "
                f"rel error {rel(error):.6e}")
    return EnrichmentTrace(
        algorithm=algorithm,
        status=status,
        records=records,
        theory=theory,
        reference_energy=reference_energy,
        final_energy_error=error,
        config=config or {},
        final_solution=state.u_tilde,
    )
