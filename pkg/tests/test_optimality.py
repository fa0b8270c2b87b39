"""Optimality of the globally coupled step among all enrichments from one local space."""
import numpy as np
import pytest

from locred.enrichment import (
    coupled_solutions,
    enrich_with,
    initial_state,
    local_solvers,
    step_globally_coupled,
    step_residual_based,
)
from locred.fem import energy_norm


@pytest.fixture(scope="module")
def states(channel16, dd16):
    """Reduced states after 0..9 residual based steps."""
    A, b = channel16.A, channel16.b
    solvers = local_solvers(dd16, A)
    state = initial_state(A, b)
    collected = [state]
    for _ in range(9):
        state, _ = step_residual_based(state, dd16, A, b, solvers=solvers)
        collected.append(state)
    return collected, solvers


def _error(problem, state):
    return energy_norm(problem.A, problem.u - state.u_tilde)


def test_pythagoras_for_every_subdomain(channel16, dd16, states):
    collected, solvers = states
    for state in collected:
        e_n = _error(channel16, state)
        solutions, shifts = coupled_solutions(state, dd16, channel16.A, channel16.b, solvers)
        for u_e, shift in zip(solutions, shifts):
            remaining = energy_norm(channel16.A, channel16.u - u_e)
            assert e_n ** 2 == pytest.approx(remaining ** 2 + shift ** 2, rel=1e-8)


def test_coupled_step_attains_best_local_solution(channel16, dd16, states):
    collected, solvers = states
    scale = channel16.reference_energy
    for state in collected:
        solutions, _ = coupled_solutions(state, dd16, channel16.A, channel16.b, solvers)
        best = min(energy_norm(channel16.A, channel16.u - u_e) for u_e in solutions)
        new_state, _ = step_globally_coupled(state, dd16, channel16.A, channel16.b, solvers=solvers)
        assert _error(channel16, new_state) == pytest.approx(best, abs=1e-8 * scale)


def test_coupled_step_beats_any_local_enrichment(channel16, dd16, states):
    collected, solvers = states
    A, b = channel16.A, channel16.b
    rng = np.random.default_rng(7)
    slack = 1e-8 * channel16.reference_energy
    for state in collected[::3]:
        coupled, _ = step_globally_coupled(state, dd16, A, b, solvers=solvers)
        residual, _ = step_residual_based(state, dd16, A, b, solvers=solvers)
        coupled_error = _error(channel16, coupled)
        assert coupled_error <= _error(channel16, residual) + slack
        for sub in dd16:
            for _ in range(20):
                psi = np.zeros(A.dimension)
                psi[sub.interior_dofs] = rng.standard_normal(sub.n_dofs)
                assert coupled_error <= _error(channel16, enrich_with(state, psi, A, b)) + slack
