import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from locred.base.exceptions import ConfigError
from locred.fem.mesh import TriMesh

logger = logging.getLogger(__name__)

GRID_TOL = 1e-9


def to_squares(length: float, n_squares: int, what: str) -> int:
    """Express ``length`` in squares of the mesh; it must lie on the grid."""
    scaled = length * n_squares
    count = int(round(scaled))
    if abs(scaled - count) > GRID_TOL * max(1.0, abs(scaled)):
        raise ConfigError(f"{what}={length} is not a multiple of the mesh pitch 1/{n_squares}")
    return count


def check_geometry(n_squares: int, S: float, step: float) -> Tuple[int, int, int]:
    """Validate box size and lattice step; returns (S, step, boxes per axis) in squares."""
    if not 0 < S <= 1:
        raise ConfigError(f"subdomain size must lie in (0, 1], got {S}")
    if step <= 0:
        raise ConfigError(f"subdomain step must be positive, got {step}")
    if step > S:
        raise ConfigError(f"subdomain step {step} exceeds size {S}: the boxes would leave gaps")
    size_sq = to_squares(S, n_squares, "subdomain_size")
    step_sq = to_squares(step, n_squares, "subdomain_step")
    if (n_squares - size_sq) % step_sq != 0:
        raise ConfigError(f"(1 - S) / step = {(1 - S) / step} is not an integer: boxes do not end at x = 1")
    return size_sq, step_sq, (n_squares - size_sq) // step_sq + 1


def check_pu_geometry(n_squares: int, S: float, step: float):
    """Clamped ramps sum to one for step = S / 2 and for the single box S = 1."""
    size_sq, step_sq, _ = check_geometry(n_squares, S, step)
    if size_sq != n_squares and size_sq != 2 * step_sq:
        raise ConfigError(
            f"partition of unity needs step = S / 2 (or S = 1), got S={S}, step={step}"
        )


@dataclass(frozen=True, eq=False)
class Subdomain:
    index: int
    box: Tuple[float, float, float, float]  # x0, y0, x1, y1
    box_squares: Tuple[int, int, int]  # ox, oy, size in squares
    interior_dofs: np.ndarray
    local_index: Dict[int, int]

    @property
    def n_dofs(self) -> int:
        return len(self.interior_dofs)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x0, y0, x1, y1 = self.box
        return (x > x0) & (x < x1) & (y > y0) & (y < y1)


@dataclass(frozen=True, eq=False)
class DomainDecomposition:
    subdomains: List[Subdomain]
    S: float
    step: float
    J: int
    n_squares: int
    size_squares: int
    step_squares: int
    boxes_per_axis: int

    @property
    def N_D(self) -> int:
        return len(self.subdomains)

    def __len__(self):
        return len(self.subdomains)

    def __iter__(self):
        return iter(self.subdomains)

    def __getitem__(self, i) -> Subdomain:
        return self.subdomains[i]


def _interior_nodes(mesh: TriMesh, ox: int, oy: int, size: int) -> np.ndarray:
    i = np.arange(ox + 1, ox + size)
    vertices = (np.arange(oy + 1, oy + size)[:, None] * (mesh.n_squares + 1) + i[None, :]).ravel()
    ix = np.arange(ox, ox + size)
    centers = ((mesh.n_squares + 1) ** 2
               + (np.arange(oy, oy + size)[:, None] * mesh.n_squares + ix[None, :]).ravel())
    return np.concatenate([vertices, centers])


def cover_counts(n_squares: int, size_sq: int, step_sq: int, boxes_per_axis: int) -> np.ndarray:
    """Number of half-open boxes covering each grid cell along one axis."""
    counts = np.zeros(n_squares, dtype=np.int64)
    for k in range(boxes_per_axis):
        counts[k * step_sq:k * step_sq + size_sq] += 1
    return counts


def build_decomposition(mesh: TriMesh, S: float, step: float) -> DomainDecomposition:
    n = mesh.n_squares
    size_sq, step_sq, per_axis = check_geometry(n, S, step)

    counts = cover_counts(n, size_sq, step_sq, per_axis)
    if counts.min() < 1:
        raise ConfigError("boxes do not cover the unit square")
    J = int(counts.max()) ** 2

    subdomains = []
    for ky in range(per_axis):
        for kx in range(per_axis):
            ox, oy = kx * step_sq, ky * step_sq
            nodes = _interior_nodes(mesh, ox, oy, size_sq)
            dofs = np.sort(mesh.free_index[nodes])
            if np.any(dofs < 0):
                raise ConfigError("subdomain interior contains a Dirichlet node")
            dofs.setflags(write=False)
            subdomains.append(Subdomain(
                index=len(subdomains),
                box=(ox / n, oy / n, (ox + size_sq) / n, (oy + size_sq) / n),
                box_squares=(ox, oy, size_sq),
                interior_dofs=dofs,
                local_index={int(g): l for l, g in enumerate(dofs)},
            ))

    dd = DomainDecomposition(
        subdomains=subdomains, S=S, step=step, J=J, n_squares=n,
        size_squares=size_sq, step_squares=step_sq, boxes_per_axis=per_axis,
    )
    logger.info(f"decomposition: N_D={dd.N_D}, J={J}, {min(s.n_dofs for s in dd)}-{max(s.n_dofs for s in dd)} DOFs per subdomain")
    return dd
