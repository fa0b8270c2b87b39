from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from locred.enrichment.reduced_basis import ReducedBasis
from locred.fem.linalg import DofVector


class Algorithm(str, Enum):
    RESIDUAL_BASED = "residual_based"
    GLOBALLY_COUPLED = "globally_coupled"


class RunStatus(Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    STAGNATED = "stagnated"


class StepStatus(Enum):
    ENRICHED = "enriched"
    BELOW_TOLERANCE = "below_tolerance"
    STAGNATED = "stagnated"


class StoppingRule(BaseModel):
    """Stop on stopping_value <= tol_abs, relative energy error <= tol_rel, or n >= max_iter."""
    model_config = {"frozen": True}

    tol_abs: float = Field(default=0.0, ge=0.0)
    tol_rel: Optional[float] = Field(default=None, ge=0.0)
    max_iter: int = Field(default=600, ge=0)


@dataclass(frozen=True, eq=False)
class EnrichmentState:
    basis: ReducedBasis
    u_tilde: DofVector
    residual: DofVector
    iteration: int


@dataclass(frozen=True, eq=False)
class StepReport:
    selected_k: int
    stopping_value: float
    status: StepStatus
    local_dual_norms: Optional[np.ndarray] = None
    shifts: Optional[np.ndarray] = None
    enrichment_vector: Optional[DofVector] = None
    # |R_n(u_hat) - ||u_hat||_a^2| relative to ||R_n||^2_{O_k'}, residual based steps only
    riesz_defect: Optional[float] = None

    @property
    def enriched(self) -> bool:
        return self.status is StepStatus.ENRICHED
