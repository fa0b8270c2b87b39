"""Partition of unity made of clamped tensor-product trapezoid ramps.

Only the convergence theory needs it: it fixes max |grad rho|^2 in the c_pu
bound and gives a sampled lower estimate of c_pu^2.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from locred.base.exceptions import ConfigError
from locred.decomposition.subdomains import DomainDecomposition, check_pu_geometry
from locred.fem.linalg import SparseSpdMatrix
from locred.fem.mesh import TriMesh

logger = logging.getLogger(__name__)

PU_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PartitionOfUnity:
    weights: np.ndarray  # (N_D, n_nodes) nodal values of rho_i
    free_nodes: np.ndarray
    free_coords: np.ndarray
    delta: float
    max_grad_sq: float
    max_val_sq: float

    @property
    def N_D(self) -> int:
        return self.weights.shape[0]

    @cached_property
    def free_weights(self) -> np.ndarray:
        return self.weights[:, self.free_nodes]


def _ramp(t2: np.ndarray, lo2: int, hi2: int, delta2: int, clamp_lo: bool, clamp_hi: bool) -> np.ndarray:
    # all arguments are coordinates times 2 n, so grid positions are integers
    values = np.ones_like(t2, dtype=float)
    if not clamp_lo:
        values = np.minimum(values, np.clip((t2 - lo2) / delta2, 0.0, 1.0))
    if not clamp_hi:
        values = np.minimum(values, np.clip((hi2 - t2) / delta2, 0.0, 1.0))
    return values


def build_pu(dd: DomainDecomposition, mesh: TriMesh) -> PartitionOfUnity:
    n = mesh.n_squares
    if dd.n_squares != n:
        raise ConfigError("decomposition and mesh have different resolutions")
    check_pu_geometry(n, dd.S, dd.step)

    # doubled integer coordinates: vertices 2i, centers 2ix + 1
    n_vertices = (n + 1) ** 2
    t2 = np.empty((mesh.n_nodes, 2), dtype=np.int64)
    grid = np.arange(n_vertices)
    t2[:n_vertices, 0] = 2 * (grid % (n + 1))
    t2[:n_vertices, 1] = 2 * (grid // (n + 1))
    cells = np.arange(n * n)
    t2[n_vertices:, 0] = 2 * (cells % n) + 1
    t2[n_vertices:, 1] = 2 * (cells // n) + 1

    delta2 = 2 * dd.step_squares
    inv_delta = n / dd.step_squares
    weights = np.empty((dd.N_D, mesh.n_nodes))
    max_grad_sq = 0.0
    for sub in dd:
        ox, oy, size = sub.box_squares
        ramps = []
        grad_sq = 0.0
        for axis, origin in ((0, ox), (1, oy)):
            clamp_lo, clamp_hi = origin == 0, origin + size == n
            ramps.append(_ramp(t2[:, axis], 2 * origin, 2 * (origin + size), delta2, clamp_lo, clamp_hi))
            if not (clamp_lo and clamp_hi):
                grad_sq += inv_delta ** 2
        weights[sub.index] = ramps[0] * ramps[1]
        max_grad_sq = max(max_grad_sq, grad_sq)

    deviation = np.max(np.abs(weights.sum(axis=0) - 1.0))
    if deviation > PU_TOL:
        raise ConfigError(f"partition of unity does not sum to one (deviation {deviation:.3e})")
    if weights.min() < 0 or weights.max() > 1:
        raise ConfigError("partition of unity values outside [0, 1]")

    free = mesh.free_nodes
    pu = PartitionOfUnity(
        weights=weights,
        free_nodes=free,
        free_coords=mesh.nodes[free],
        delta=dd.step,
        max_grad_sq=max_grad_sq,
        max_val_sq=float(weights.max()) ** 2,
    )
    logger.info(f"partition of unity: delta={pu.delta}, max |grad rho|^2={pu.max_grad_sq}, sum deviation {deviation:.1e}")
    return pu


def pu_quotient(pu: PartitionOfUnity, A: SparseSpdMatrix, phi: np.ndarray) -> float:
    """sum_i ||I_h(rho_i phi)||_a^2 / ||phi||_a^2"""
    products = pu.free_weights * phi[None, :]
    energies = np.einsum("ij,ji->i", products, A.csr @ products.T)
    denominator = phi @ (A.csr @ phi)
    return float(energies.sum() / denominator)


def cpu_rayleigh_sample(pu: PartitionOfUnity, A: SparseSpdMatrix, samples: int, seed: int = 0,
                        extra: Optional[Iterable[np.ndarray]] = None) -> float:
    """Sampled lower estimate of c_pu^2 (a diagnostic, not a bound).

    Candidates are a smooth bubble, ``samples`` seeded random vectors and any
    ``extra`` vectors such as the reference solution.
    """
    if samples < 1:
        raise ConfigError("cpu_rayleigh_sample needs at least one sample")
    if pu.free_weights.shape[1] != A.dimension:
        raise ConfigError("partition of unity and operator live on different meshes")
    rng = np.random.default_rng(seed)
    x, y = pu.free_coords[:, 0], pu.free_coords[:, 1]
    candidates = [np.sin(np.pi * x) * np.sin(np.pi * y)]
    candidates += [rng.standard_normal(A.dimension) for _ in range(samples)]
    candidates += list(extra or [])

    best = 0.0
    for phi in candidates:
        if not np.any(phi):
            continue
        best = max(best, pu_quotient(pu, A, phi))
    logger.info(f"sampled c_pu^2 >= {best:.6e} over {len(candidates)} candidates")
    return best
