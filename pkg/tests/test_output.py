import math

import numpy as np
import pytest

from locred.base import ConfigError, OutputError
from locred.diagnostics import emit_dat, read_dat
from locred.enrichment import Algorithm

from tests.helpers import synthetic_trace


@pytest.fixture
def residual_trace():
    return synthetic_trace([3.0, 1.0 / 3.0, 0.1, 1e-14], sharpness_r2=math.inf)


def test_residual_based_files(residual_trace, tmp_path):
    written = emit_dat(residual_trace, tmp_path)
    assert [p.name for p in written] == ["errors.dat", "convergence.dat", "ineq.dat"]

    errors = read_dat(tmp_path / "errors.dat")
    assert errors.shape == (3, 1)
    np.testing.assert_array_equal(errors[:, 0], [r.rel_energy_error for r in residual_trace.records])
    np.testing.assert_array_equal(read_dat(tmp_path / "convergence.dat")[:, 0],
                                  [r.rate_metric for r in residual_trace.records])

    ineq_text = (tmp_path / "ineq.dat").read_text()
    assert ineq_text.startswith("#")
    assert len(ineq_text.splitlines()) == 4
    ineq = read_dat(tmp_path / "ineq.dat")
    assert ineq.shape == (3, 3)
    assert np.all(np.isinf(ineq[:, 2]))


def test_coupled_files(tmp_path):
    trace = synthetic_trace([1.0, 0.5, 0.25], algorithm=Algorithm.GLOBALLY_COUPLED)
    written = emit_dat(trace, tmp_path / "nested")
    assert sorted(p.name for p in written) == ["convergence_g_c.dat", "errors_g_c.dat"]
    assert (tmp_path / "nested" / "errors_g_c.dat").read_bytes() == b"1\n0.5\n"


def test_format_is_plain_lf_and_deterministic(residual_trace, tmp_path):
    emit_dat(residual_trace, tmp_path / "a")
    emit_dat(residual_trace, tmp_path / "b")
    for name in ("errors.dat", "convergence.dat", "ineq.dat"):
        content = (tmp_path / "a" / name).read_bytes()
        assert b"\r" not in content
        assert content.endswith(b"\n")
        assert content == (tmp_path / "b" / name).read_bytes()


def test_seventeen_significant_digits(tmp_path):
    trace = synthetic_trace([3.0, 1.0])
    emit_dat(trace, tmp_path)
    line = (tmp_path / "convergence.dat").read_text().strip()
    assert line == "%.17g" % (1.0 - 1.0 / 3.0)
    assert float(line) == trace.records[0].rate_metric


def test_empty_trace_rejected(tmp_path):
    with pytest.raises(ConfigError):
        emit_dat(synthetic_trace([1.0]), tmp_path)


def test_unwritable_directory(residual_trace, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    with pytest.raises(OutputError) as excinfo:
        emit_dat(residual_trace, blocker / "out")
    assert "blocker" in str(excinfo.value)
