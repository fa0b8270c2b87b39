import numpy as np
import pytest

from locred.decomposition import build_decomposition
from locred.enrichment import ReducedBasis, local_factor, local_riesz, local_solvers, reduced_solve, solve_coupled
from locred.fem import CoefficientField, SourceField, discretize, energy_norm


@pytest.fixture(scope="module")
def small(mesh4):
    """4 x 4 squares; each of the 9 subdomains holds one vertex and four centers."""
    values = np.linspace(1.0, 50.0, 16)
    problem = discretize(mesh4, CoefficientField(values), SourceField.constant(4, 1.0))
    return problem, build_decomposition(mesh4, 0.5, 0.25)


def test_dual_norm_matches_dense_oracle(small):
    problem, dd = small
    dense = problem.A.csr.toarray()
    residual = problem.b - dense @ (0.3 * problem.u)
    for sub in dd:
        idx = sub.interior_dofs
        assert len(idx) == 5
        r = residual[idx]
        expected = np.sqrt(r @ np.linalg.solve(dense[np.ix_(idx, idx)], r))
        rep, dual = local_riesz(residual, sub, problem.A)
        assert dual == pytest.approx(expected, rel=1e-8)
        assert not np.any(np.delete(rep, idx))


def test_riesz_identity_and_supremum(channel16, dd16):
    A = channel16.A
    rng = np.random.default_rng(5)
    residual = channel16.b
    for sub in dd16:
        rep, dual = local_riesz(residual, sub, A)
        assert residual @ rep == pytest.approx(dual ** 2, rel=1e-8)
        assert rep @ (A.csr @ rep) == pytest.approx(dual ** 2, rel=1e-8)
        for _ in range(5):
            phi = np.zeros(A.dimension)
            phi[sub.interior_dofs] = rng.standard_normal(sub.n_dofs)
            assert residual @ phi <= dual * np.sqrt(phi @ (A.csr @ phi)) * (1 + 1e-10)


def test_coupled_solve_with_empty_basis_is_local_solve(poisson16, dd16):
    A = poisson16.A
    basis = ReducedBasis.empty(A.dimension)
    rep, _ = local_riesz(poisson16.b, dd16[4], A)
    np.testing.assert_allclose(solve_coupled(basis, dd16[4], A, poisson16.b), rep, rtol=1e-12, atol=1e-16)


def test_coupled_solve_galerkin_orthogonality(channel16, dd16):
    A, b = channel16.A, channel16.b
    rng = np.random.default_rng(6)
    basis = ReducedBasis.empty(A.dimension)
    for _ in range(4):
        basis = basis.extend(rng.standard_normal(A.dimension), A)
    factors = local_solvers(dd16, A)
    for sub, factor in zip(dd16, factors):
        u_e = solve_coupled(basis, sub, A, b, factor)
        defect = b - A.csr @ u_e
        scale = np.linalg.norm(b)
        assert np.linalg.norm(defect[sub.interior_dofs]) <= 1e-8 * scale
        assert np.max(np.abs(basis.vectors.T @ defect)) <= 1e-8 * scale


def test_coupled_solve_with_linearly_dependent_generators(poisson16, dd16):
    A, b = poisson16.A, poisson16.b
    sub = dd16[0]
    inside = np.zeros(A.dimension)
    inside[sub.interior_dofs] = 1.0
    outside = np.zeros(A.dimension)
    outside[dd16[8].interior_dofs] = 1.0
    basis = ReducedBasis.empty(A.dimension).extend(inside, A).extend(outside, A)
    u_e = solve_coupled(basis, sub, A, b, local_factor(sub, A))
    defect = b - A.csr @ u_e
    assert np.linalg.norm(defect[sub.interior_dofs]) <= 1e-8 * np.linalg.norm(b)
    assert abs(basis.vectors[:, 1] @ defect) <= 1e-8 * np.linalg.norm(b)


def test_coupled_solve_exact_when_basis_holds_solution(poisson16, dd16):
    A = poisson16.A
    basis = ReducedBasis.empty(A.dimension).extend(poisson16.u, A)
    u_e = solve_coupled(basis, dd16[2], A, poisson16.b)
    np.testing.assert_allclose(u_e, poisson16.u, rtol=1e-8, atol=1e-10 * np.abs(poisson16.u).max())


def test_whole_domain_dual_norm_is_energy_error(channel16, mesh16):
    A, b, u = channel16.A, channel16.b, channel16.u
    whole = build_decomposition(mesh16, 1.0, 1.0)
    assert whole.N_D == 1 and whole[0].n_dofs == A.dimension
    rng = np.random.default_rng(7)
    basis = ReducedBasis.empty(A.dimension)
    for _ in range(3):
        basis = basis.extend(rng.standard_normal(A.dimension), A)
        u_tilde = reduced_solve(basis, A, b)
        _, dual = local_riesz(b - A.csr @ u_tilde, whole[0], A)
        assert dual == pytest.approx(energy_norm(A, u - u_tilde), rel=1e-8)
