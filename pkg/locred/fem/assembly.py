"""P1 assembly of a(u, phi) = int kappa grad u . grad phi and f(phi) = int f phi.

Coefficients are constant per square, so element integrals are exact.
Dirichlet nodes are eliminated: both operators act on free DOFs only.
"""
import numpy as np
import scipy.sparse as sps

from locred.base.exceptions import ConfigError
from locred.fem.fields import CoefficientField, SourceField
from locred.fem.linalg import DofVector, SparseSpdMatrix
from locred.fem.mesh import TriMesh


def _check_resolution(mesh: TriMesh, n_squares: int, kind: str):
    if n_squares != mesh.n_squares:
        raise ConfigError(f"{kind} defined on {n_squares}x{n_squares} squares, mesh has {mesh.n_squares}")


def _square_index(mesh: TriMesh) -> np.ndarray:
    return mesh.square_of_triangle[:, 1] * mesh.n_squares + mesh.square_of_triangle[:, 0]


def p1_gradients(mesh: TriMesh):
    """Constant gradients of the three hat functions on every triangle, and the areas."""
    p = mesh.nodes[mesh.triangles]
    x, y = p[:, :, 0], p[:, :, 1]
    area = mesh.signed_areas()
    # grad phi_a = (y_b - y_c, x_c - x_b) / (2 area) for (a, b, c) cyclic
    gx = (np.roll(y, -1, axis=1) - np.roll(y, -2, axis=1)) / (2 * area[:, None])
    gy = (np.roll(x, -2, axis=1) - np.roll(x, -1, axis=1)) / (2 * area[:, None])
    return np.stack([gx, gy], axis=2), area


def assemble_stiffness(mesh: TriMesh, kappa: CoefficientField) -> SparseSpdMatrix:
    _check_resolution(mesh, kappa.n_squares, "CoefficientField")
    grads, area = p1_gradients(mesh)
    weight = kappa.values[_square_index(mesh)] * area
    local = weight[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)

    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    full = sps.coo_matrix((local.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)).tocsr()

    free = mesh.free_nodes
    A = full[free][:, free]
    # exact symmetry; the entries already agree up to summation order
    A = 0.5 * (A + A.T)
    return SparseSpdMatrix(A)


def assemble_load(mesh: TriMesh, f: SourceField) -> DofVector:
    _check_resolution(mesh, f.n_squares, "SourceField")
    area = mesh.signed_areas()
    # int_T phi_a = |T| / 3 for every hat function
    contribution = np.repeat(f.values[_square_index(mesh)] * area / 3.0, 3)
    full = np.bincount(mesh.triangles.ravel(), weights=contribution, minlength=mesh.n_nodes)
    return full[mesh.free_nodes]
