from typing import List

from locred.diagnostics import EnrichmentTrace, IterationRecord
from locred.enrichment import Algorithm, RunStatus


def synthetic_trace(errors: List[float], algorithm: Algorithm = Algorithm.RESIDUAL_BASED,
                    status: RunStatus = RunStatus.MAX_ITER, **record_fields) -> EnrichmentTrace:
    """Trace whose energy errors follow ``errors`` with reference energy errors[0]."""
    records = []
    for n, (prev, nxt) in enumerate(zip(errors, errors[1:])):
        fields = {"sharpness_chungend": 1.5, "sharpness_r1": 2.0, "sharpness_r2": 3.0}
        fields.update(record_fields)
        records.append(IterationRecord(
            n=n, selected_k=n % 3, energy_error=prev, next_energy_error=nxt,
            rel_energy_error=prev / errors[0], rate_metric=1.0 - nxt / prev,
            stopping_value=prev / 2, **fields,
        ))
    return EnrichmentTrace(algorithm=algorithm, status=status, records=records,
                           reference_energy=errors[0], final_energy_error=errors[-1])
