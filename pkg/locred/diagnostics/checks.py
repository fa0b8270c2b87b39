"""Verification of enrichment traces against the a priori convergence theory.

Every check returns a dict with ``verified`` and a list of human readable
``issues``; nothing here raises on a failed check.
"""
import logging
import math
from typing import Any, Dict, List, Optional

from locred.decomposition.constants import cpu_upper_bound, rate_bound, TheoryConstants
from locred.decomposition.partition_of_unity import PartitionOfUnity
from locred.decomposition.subdomains import DomainDecomposition
from locred.diagnostics.records import EnrichmentTrace, IterationRecord
from locred.enrichment.state import Algorithm

logger = logging.getLogger(__name__)


class TraceChecker:
    def __init__(self, thresholds: Optional[Dict[str, float]] = None):
        self.thresholds = {
            "monotonicity_slack": 1e-10,
            "rate_slack": 1e-12,
            "global_bound_slack": 1e-10,
            "r_slack": 1e-12,
            "chungend_slack": 1e-8,
            "rate_consistency": 1e-12,
        }
        self.thresholds.update(thresholds or {})

    def _check_monotone(self, record: IterationRecord) -> List[str]:
        if record.next_energy_error > record.energy_error * (1 + self.thresholds["monotonicity_slack"]):
            return [f"n={record.n}: energy error increased from {record.energy_error:.6e} "
                    f"to {record.next_energy_error:.6e}"]
        return []

    def _check_rate(self, record: IterationRecord, theory: TheoryConstants) -> List[str]:
        issues = []
        if record.rate_metric < theory.one_minus_c - self.thresholds["rate_slack"]:
            issues.append(f"n={record.n}: rate_metric {record.rate_metric:.6e} below 1 - c = {theory.one_minus_c:.6e}")
        bound = theory.c ** record.n
        if record.rel_energy_error > bound * (1 + self.thresholds["global_bound_slack"]):
            issues.append(f"n={record.n}: relative error {record.rel_energy_error:.6e} above c^n = {bound:.6e}")
        return issues

    def _check_sharpness(self, record: IterationRecord, algorithm: Algorithm) -> List[str]:
        issues = []
        lower = {"sharpness_r2": 1 - self.thresholds["r_slack"]}
        if algorithm is Algorithm.RESIDUAL_BASED:
            lower["sharpness_r1"] = 1 - self.thresholds["r_slack"]
            lower["sharpness_chungend"] = 1 - self.thresholds["chungend_slack"]
        for name, threshold in lower.items():
            value = getattr(record, name)
            if not math.isnan(value) and value < threshold:
                issues.append(f"n={record.n}: {name} = {value:.12g} < {threshold:.12g}")
        return issues

    def check_trace(self, trace: EnrichmentTrace) -> Dict[str, Any]:
        issues = []
        checked = 0
        for record in trace.records:
            if record.energy_error > 0:
                recomputed = 1.0 - record.next_energy_error / record.energy_error
                if abs(recomputed - record.rate_metric) > self.thresholds["rate_consistency"]:
                    issues.append(f"n={record.n}: rate_metric inconsistent with recorded errors")
            if record.noise:
                continue
            checked += 1
            issues += self._check_monotone(record)
            if trace.theory is not None:
                issues += self._check_rate(record, trace.theory)
            issues += self._check_sharpness(record, trace.algorithm)

        if issues:
            logger.warning(f"{trace.algorithm.value} trace: {len(issues)} issues, first: {issues[0]}")
        return {
            "verified": not issues,
            "issues": issues,
            "algorithm": trace.algorithm.value,
            "records_checked": checked,
            "records_below_noise_floor": trace.iterations - checked,
        }

    def check_theory(self, theory: TheoryConstants, dd: DomainDecomposition, pu: PartitionOfUnity) -> Dict[str, Any]:
        issues = []
        if theory.c_f is None or theory.contrast is None:
            return {"verified": False, "issues": ["theory constants carry no c_f or contrast"]}
        expected = {"J": dd.J, "N_D": dd.N_D, "max_grad_sq": pu.max_grad_sq, "max_val_sq": pu.max_val_sq}
        for name, value in expected.items():
            if getattr(theory, name) != value:
                issues.append(f"{name}: stored {getattr(theory, name)}, recomputed {value}")
        cpu_sq = cpu_upper_bound(dd.J, theory.c_f, theory.contrast, pu.max_grad_sq, pu.max_val_sq)
        if cpu_sq != theory.cpu_sq_bound:
            issues.append(f"cpu_sq_bound: stored {theory.cpu_sq_bound!r}, recomputed {cpu_sq!r}")
        rate = rate_bound(cpu_sq, dd.N_D)
        if rate.c != theory.c or rate.one_minus_c != theory.one_minus_c:
            issues.append(f"contraction: stored c={theory.c!r}, recomputed c={rate.c!r}")
        return {"verified": not issues, "issues": issues, "cpu_sq_bound": cpu_sq, "c": rate.c,
                "one_minus_c": rate.one_minus_c}


def iterations_to_tolerance(trace: EnrichmentTrace, tol_rel: float) -> Optional[int]:
    """First n with relative error <= tol_rel, counting the final state."""
    for record in trace.records:
        if record.rel_energy_error <= tol_rel:
            return record.n
    if trace.final_rel_error <= tol_rel:
        return trace.iterations
    return None


def compare_traces(residual_trace: EnrichmentTrace, coupled_trace: EnrichmentTrace,
                   tol_rel: Optional[float] = None) -> Dict[str, Any]:
    """Side by side summary of both algorithms; informational only."""
    comparison: Dict[str, Any] = {}
    for trace in (residual_trace, coupled_trace):
        entry = {
            "status": trace.status.value,
            "iterations": trace.iterations,
            "final_rel_error": trace.final_rel_error,
        }
        if tol_rel is not None:
            entry["iterations_to_tolerance"] = iterations_to_tolerance(trace, tol_rel)
        comparison[trace.algorithm.value] = entry
    first = [t.records[0].next_energy_error for t in (residual_trace, coupled_trace) if t.records]
    if len(first) == 2:
        comparison["first_step_error_ratio"] = first[1] / first[0] if first[0] > 0 else math.nan
    return comparison


_default_checker = TraceChecker()


def check_trace(trace: EnrichmentTrace) -> Dict[str, Any]:
    return _default_checker.check_trace(trace)


def check_theory(theory: TheoryConstants, dd: DomainDecomposition, pu: PartitionOfUnity) -> Dict[str, Any]:
    return _default_checker.check_theory(theory, dd, pu)
