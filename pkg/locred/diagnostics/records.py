"""Per-iteration convergence records and the trace of a whole run."""
import math
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from locred.decomposition.constants import TheoryConstants
from locred.enrichment.state import Algorithm, EnrichmentState, RunStatus, StepReport
from locred.fem.linalg import DofVector, SparseSpdMatrix, energy_norm

NOISE_FLOOR = 1e-13
TINY = 1e-300


def guarded_quotient(numerator: float, denominator: float) -> float:
    if abs(denominator) < TINY:
        return math.inf
    return numerator / denominator


class IterationRecord(BaseModel):
    n: int
    selected_k: int
    energy_error: float
    next_energy_error: float
    rel_energy_error: float = Field(ge=0.0)
    rate_metric: float
    # each quotient is (bound side) / (bounded side): >= 1 holds, = 1 is sharp
    sharpness_chungend: float = math.nan
    sharpness_r1: float = math.nan
    sharpness_r2: float = math.nan
    stopping_value: float
    riesz_defect: Optional[float] = None
    local_dual_norms: Optional[List[float]] = None
    shifts: Optional[List[float]] = None
    noise: bool = False


def compute_record(prev_error: float, state: EnrichmentState, step_report: StepReport, u_ref: DofVector,
                   A: SparseSpdMatrix, *, cpu_sq: Optional[float] = None,
                   reference_energy: Optional[float] = None) -> IterationRecord:
    """Record the step that produced ``state`` from a reduced solution with error ``prev_error``.

    ||R_n||_{V'} is taken as ||u_n - u||_a, which holds exactly in the energy norm.
    """
    if reference_energy is None:
        reference_energy = energy_norm(A, u_ref)
    next_error = energy_norm(A, u_ref - state.u_tilde)
    rel = prev_error / reference_energy if reference_energy > 0 else 0.0
    rate = 1.0 - next_error / prev_error if prev_error >= TINY else 1.0

    fields: Dict[str, Any] = {}
    duals = step_report.local_dual_norms
    if duals is not None:
        squares = np.asarray(duals) ** 2
        k = step_report.selected_k
        fields["sharpness_chungend"] = guarded_quotient(prev_error ** 2 - squares[k], next_error ** 2)
        fields["sharpness_r1"] = guarded_quotient(squares.max(), squares.mean())
        if cpu_sq is not None:
            fields["sharpness_r2"] = guarded_quotient(cpu_sq * squares.sum(), prev_error ** 2)
        fields["local_dual_norms"] = [float(d) for d in duals]
    if step_report.shifts is not None:
        fields["shifts"] = [float(s) for s in step_report.shifts]

    return IterationRecord(
        n=state.iteration - 1,
        selected_k=step_report.selected_k,
        energy_error=prev_error,
        next_energy_error=next_error,
        rel_energy_error=rel,
        rate_metric=rate,
        stopping_value=step_report.stopping_value,
        riesz_defect=step_report.riesz_defect,
        noise=rel < NOISE_FLOOR,
        **fields,
    )


class EnrichmentTrace(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    algorithm: Algorithm
    status: RunStatus
    records: List[IterationRecord] = Field(default_factory=list)
    theory: Optional[TheoryConstants] = None
    reference_energy: float
    final_energy_error: float
    config: Dict[str, Any] = Field(default_factory=dict)
    final_solution: Optional[Any] = Field(default=None, exclude=True, repr=False)

    @model_validator(mode="after")
    def _check_consistency(self):
        for prev, nxt in zip(self.records, self.records[1:]):
            if nxt.energy_error != prev.next_energy_error:
                raise ValueError(f"record {nxt.n} does not continue record {prev.n}")
        for record in self.records:
            if record.energy_error >= TINY:
                recomputed = 1.0 - record.next_energy_error / record.energy_error
                if abs(recomputed - record.rate_metric) > 1e-12:
                    raise ValueError(f"rate_metric of record {record.n} inconsistent with its errors")
        return self

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_rel_error(self) -> float:
        return self.final_energy_error / self.reference_energy if self.reference_energy > 0 else 0.0

    def to_frame(self) -> pd.DataFrame:
        columns = ["n", "selected_k", "rel_energy_error", "rate_metric", "sharpness_chungend",
                   "sharpness_r1", "sharpness_r2", "stopping_value", "noise"]
        return pd.DataFrame([record.model_dump(include=set(columns)) for record in self.records],
                            columns=columns)
