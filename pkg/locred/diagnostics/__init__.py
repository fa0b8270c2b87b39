from locred.diagnostics.records import (
    NOISE_FLOOR,
    EnrichmentTrace,
    IterationRecord,
    compute_record,
    guarded_quotient,
)
from locred.diagnostics.output import DAT_FILES, emit_dat, read_dat
from locred.diagnostics.checks import TraceChecker, check_theory, check_trace, compare_traces
