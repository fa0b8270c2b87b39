from locred.fem.assembly import assemble_load, assemble_stiffness
from locred.fem.fields import CoefficientField, SourceField
from locred.fem.linalg import (
    DofVector,
    SparseSpdMatrix,
    SpdFactor,
    energy_inner,
    energy_norm,
    factorize_spd,
    reference_solve,
    rounding_floor,
    solve_psd,
    solve_spd,
)
from locred.fem.mesh import TriMesh, build_mesh
from locred.fem.problem import DiscreteProblem, discretize
