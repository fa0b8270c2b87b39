from locred.enrichment.reduced_basis import ReducedBasis, reduced_solve
from locred.enrichment.state import (
    Algorithm,
    EnrichmentState,
    RunStatus,
    StepReport,
    StepStatus,
    StoppingRule,
)
from locred.enrichment.local_problems import local_factor, local_riesz, local_solvers, solve_coupled
from locred.enrichment.algorithms import (
    coupled_solutions,
    enrich_with,
    initial_state,
    local_dual_norms,
    run,
    state_from_basis,
    step_globally_coupled,
    step_residual_based,
)
