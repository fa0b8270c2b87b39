import pytest

from locred.runner.cli import EXIT_CONFIG, EXIT_MAX_ITER, main
from locred.runner.config import load_config

DAT_FILES = ["errors.dat", "convergence.dat", "ineq.dat", "errors_g_c.dat", "convergence_g_c.dat"]

SMALL_RUN = """\
n_squares=8
subdomain_size=0.5
subdomain_step=0.25
algorithm=both
kappa_background=1
kappa_rect=none
kappa_rect=0 0.5 1 0.625 1000
f_background=1
f_rect=none
tol_rel=1e-6
max_iter=200
cpu_samples=2
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_RUN)
    return path


@pytest.fixture(autouse=True)
def no_env_output_dir(monkeypatch):
    monkeypatch.delenv("LOCRED_OUTPUT_DIR", raising=False)


def test_help(capsys):
    assert main(["--help"]) == 0
    assert "--n-squares" in capsys.readouterr().out


def test_usage_error():
    assert main(["--threads", "many"]) == EXIT_CONFIG


def test_invalid_geometry_writes_nothing(small_config, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["--config", str(small_config), "--output-dir", str(out), "--algorithm", "residual_based",
                 "--n-squares", "10"])
    assert code == EXIT_CONFIG
    assert not out.exists()
    assert "configuration error" in capsys.readouterr().err


def test_full_run(small_config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["--config", str(small_config), "--output-dir", str(out)]) == 0
    for name in DAT_FILES + ["summary.txt", "process_log.json", "locred.log"]:
        assert (out / name).exists(), name
    summary = (out / "summary.txt").read_text()
    assert "result.status=converged" in summary
    assert "result.N_D=9" in summary
    assert "result.residual_based.verified=true" in summary
    assert "wall_time" not in summary
    echoed = capsys.readouterr().out
    assert "result.cpu_sq_bound=" in echoed
    assert "wall_time_seconds=" in echoed


def test_runs_are_byte_identical_across_thread_counts(small_config, tmp_path):
    for name, threads in (("one", "1"), ("many", "4")):
        assert main(["--config", str(small_config), "--output-dir", str(tmp_path / name),
                     "--threads", threads]) == 0
    for name in DAT_FILES + ["summary.txt"]:
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "many" / name).read_bytes(), name


def test_summary_is_a_config(small_config, tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(small_config), "--output-dir", str(out), "--algorithm", "residual_based"]) == 0
    expected = load_config(small_config, overrides={"algorithm": "residual_based"}, env={})
    assert load_config(out / "summary.txt", env={}) == expected


def test_max_iter_exit_code(small_config, tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(small_config), "--output-dir", str(out), "--max-iter", "2"]) == EXIT_MAX_ITER
    assert len((out / "errors.dat").read_text().splitlines()) == 2


def test_output_dir_from_environment(small_config, tmp_path, monkeypatch):
    monkeypatch.setenv("LOCRED_OUTPUT_DIR", str(tmp_path / "env_out"))
    assert main(["--config", str(small_config), "--algorithm", "globally_coupled"]) == 0
    assert (tmp_path / "env_out" / "errors_g_c.dat").exists()
    assert not (tmp_path / "env_out" / "errors.dat").exists()


def test_config_file_output_dir_beats_environment(small_config, tmp_path, monkeypatch):
    small_config.write_text(SMALL_RUN + f"output_dir={tmp_path / 'file_out'}\n")
    monkeypatch.setenv("LOCRED_OUTPUT_DIR", str(tmp_path / "env_out"))
    assert main(["--config", str(small_config), "--algorithm", "residual_based"]) == 0
    assert (tmp_path / "file_out" / "errors.dat").exists()
    assert not (tmp_path / "env_out").exists()
