import math

import pytest

from locred.decomposition import theory_constants
from locred.diagnostics import check_trace
from locred.enrichment import Algorithm, RunStatus, StoppingRule, run
from locred.runner.config import load_config
from locred.runner.pipeline import ExperimentPipeline


def _assert_record_inequalities(trace, one_minus_c):
    for record in trace.records:
        assert record.next_energy_error <= record.energy_error * (1 + 1e-10)
        if record.noise:
            continue
        assert record.rate_metric >= one_minus_c - 1e-12
        quotients = [record.sharpness_r1, record.sharpness_r2]
        if trace.algorithm is Algorithm.RESIDUAL_BASED:
            quotients.append(record.sharpness_chungend)
        for value in quotients:
            assert not math.isnan(value)
            assert value >= 1 - 1e-8


@pytest.mark.parametrize("algorithm", list(Algorithm))
def test_contrast_1e5_channel(contrast16, dd16, pu16, algorithm):
    theory = theory_constants(dd16, pu16, contrast16.kappa)
    assert theory.contrast == 1e5
    stop = StoppingRule(tol_rel=1e-6, max_iter=120)
    trace = run(algorithm, contrast16.mesh, contrast16.kappa, contrast16.f, dd16, stop,
                problem=contrast16, theory=theory)
    assert trace.status in (RunStatus.CONVERGED, RunStatus.MAX_ITER)
    assert trace.final_rel_error < trace.records[0].rel_energy_error
    assert check_trace(trace)["verified"]
    _assert_record_inequalities(trace, theory.one_minus_c)


@pytest.mark.slow
def test_shipped_experiment_converges_and_verifies(tmp_path):
    config = load_config(None, overrides={"output_dir": str(tmp_path), "threads": 4}, env={})
    assert config.n_squares == 50 and config.max_iter == 600
    pipeline = ExperimentPipeline(config)
    result = pipeline.execute()
    assert result["status"] is RunStatus.CONVERGED
    theory = pipeline.process_log.require("decomposition")["theory"]
    assert [t.algorithm for t in result["traces"]] == [Algorithm.RESIDUAL_BASED, Algorithm.GLOBALLY_COUPLED]
    for trace in result["traces"]:
        assert trace.status is RunStatus.CONVERGED
        assert trace.iterations <= 600
        assert trace.final_rel_error <= 1e-6
        assert check_trace(trace)["verified"]
        assert pipeline.process_log.require(f"verification_{trace.algorithm.value}")["verified"]
        _assert_record_inequalities(trace, theory.one_minus_c)
