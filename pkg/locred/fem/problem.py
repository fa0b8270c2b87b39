import logging
from dataclasses import dataclass
from typing import Optional

from locred.fem.assembly import assemble_load, assemble_stiffness
from locred.fem.fields import CoefficientField, SourceField
from locred.fem.linalg import DofVector, SparseSpdMatrix, energy_norm, reference_solve
from locred.fem.mesh import TriMesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    """Assembled full-order problem together with its reference solution."""

    mesh: TriMesh
    kappa: CoefficientField
    f: SourceField
    A: SparseSpdMatrix
    b: DofVector
    u: DofVector

    @property
    def reference_energy(self) -> float:
        return energy_norm(self.A, self.u)


def discretize(mesh: TriMesh, kappa: CoefficientField, f: SourceField,
               u: Optional[DofVector] = None) -> DiscreteProblem:
    A = assemble_stiffness(mesh, kappa)
    b = assemble_load(mesh, f)
    logger.info(f"assembled {A.dimension} free DOFs, {A.csr.nnz} nonzeros, contrast {kappa.contrast:.3e}")
    if u is None:
        u = reference_solve(A, b)
    return DiscreteProblem(mesh=mesh, kappa=kappa, f=f, A=A, b=b, u=u)
