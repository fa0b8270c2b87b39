"""Structured criss-cross triangulation of the unit square.

Every square of an ``n_squares x n_squares`` grid is split into four
triangles by its center node. Nodes are numbered grid vertices first
(row-major, x fastest), then square centers (row-major).
"""
from dataclasses import dataclass

import numpy as np

from locred.base.exceptions import ConfigError


@dataclass(frozen=True, eq=False)
class TriMesh:
    n_squares: int
    nodes: np.ndarray  # (n_nodes, 2)
    triangles: np.ndarray  # (4 n^2, 3), counter-clockwise
    square_of_triangle: np.ndarray  # (4 n^2, 2) -> (ix, iy)
    is_boundary: np.ndarray  # (n_nodes,) bool
    free_index: np.ndarray  # (n_nodes,) free-DOF index, -1 if constrained

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def free_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.free_index >= 0)

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero(self.free_index >= 0))

    @property
    def h(self) -> float:
        return 1.0 / self.n_squares

    def vertex(self, i: int, j: int) -> int:
        return j * (self.n_squares + 1) + i

    def center(self, ix: int, iy: int) -> int:
        return (self.n_squares + 1) ** 2 + iy * self.n_squares + ix

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def to_full(self, dofs: np.ndarray) -> np.ndarray:
        """Extend a free-DOF vector by zero to all nodes."""
        full = np.zeros(self.n_nodes)
        full[self.free_nodes] = dofs
        return full

    def interpolate(self, func) -> np.ndarray:
        """Nodal interpolant of ``func(x, y)`` restricted to the free DOFs."""
        free = self.free_nodes
        return np.asarray(func(self.nodes[free, 0], self.nodes[free, 1]), dtype=float)


def build_mesh(n_squares: int) -> TriMesh:
    if int(n_squares) != n_squares or n_squares < 1:
        raise ConfigError(f"n_squares must be a positive integer, got {n_squares}")
    n = int(n_squares)

    j, i = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    vertices = np.column_stack([i.ravel() / n, j.ravel() / n])
    iy, ix = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ix, iy = ix.ravel(), iy.ravel()
    centers = np.column_stack([(ix + 0.5) / n, (iy + 0.5) / n])
    nodes = np.vstack([vertices, centers])

    v00 = iy * (n + 1) + ix
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    c = (n + 1) ** 2 + iy * n + ix
    # bottom, right, top, left triangle of each square
    triangles = np.stack([
        np.column_stack([v00, v10, c]),
        np.column_stack([v10, v11, c]),
        np.column_stack([v11, v01, c]),
        np.column_stack([v01, v00, c]),
    ], axis=1).reshape(-1, 3)
    square_of_triangle = np.repeat(np.column_stack([ix, iy]), 4, axis=0)

    n_vertices = (n + 1) ** 2
    is_boundary = np.zeros(len(nodes), dtype=bool)
    is_boundary[:n_vertices] = (
        (i.ravel() == 0) | (i.ravel() == n) | (j.ravel() == 0) | (j.ravel() == n)
    )
    free_index = np.full(len(nodes), -1, dtype=np.int64)
    free_index[~is_boundary] = np.arange(np.count_nonzero(~is_boundary))

    return TriMesh(
        n_squares=n,
        nodes=nodes,
        triangles=triangles.astype(np.int64),
        square_of_triangle=square_of_triangle.astype(np.int64),
        is_boundary=is_boundary,
        free_index=free_index,
    )
