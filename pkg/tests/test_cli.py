from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

import pysteklov
from pysteklov.cli import main

FIXTURES = Path(pysteklov.__file__).parent / "fixtures"
SMALL_MESH = ["--n-radial", "4", "--n-angular", "32"]


@pytest.fixture
def runner():
    return CliRunner()


def test_oracle_planar(runner):
    result = runner.invoke(main, ["oracle", "-n", "2", "-r", "1", "-R", "2", "-b", "1"])
    assert result.exit_code == 0
    lines = dict(line.split() for line in result.output.splitlines())
    assert lines["sigma_beta"] == "0.2953081"
    assert lines["sigma_D"] == "0.7213475"
    assert lines["q"] == "0.5000000"


def test_oracle_notes_corrected_formula(runner):
    result = runner.invoke(main, ["oracle", "-n", "3", "-r", "1", "-R", "2", "-b", "1"])
    assert result.exit_code == 0
    assert "0.1666667" in result.output
    assert "corrected" in result.output


def test_oracle_rejects_parameters(runner):
    result = runner.invoke(main, ["oracle", "-n", "2", "-r", "0", "-R", "2", "-b", "1"])
    assert result.exit_code == 2
    assert "error" in result.output


def test_solve_writes_outputs(runner, tmp_path):
    result = runner.invoke(main, ["solve", "--shell", "1,2", *SMALL_MESH, "--output", str(tmp_path),
                                  "--format", "csv", "--format", "json"])
    assert result.exit_code == 0, result.output
    assert "sigma_beta" in result.output
    summary = pd.read_csv(tmp_path / "solve.csv")
    assert summary["sigma_beta"].iloc[0] < summary["sigma_D"].iloc[0]
    assert len(pd.read_csv(tmp_path / "eigenfunction.csv")) == 5 * 32
    assert (tmp_path / "solve.json").exists()


def test_solve_rejects_bad_shell(runner):
    result = runner.invoke(main, ["solve", "--shell", "2,1"])
    assert result.exit_code == 2


def test_solver_failure_names_stage(runner, tmp_path):
    bad = tmp_path / "flat.mesh"
    bad.write_text("annular-mesh v1\n3 1 2\n0.0 0.0\n1.0 0.0\n2.0 0.0\n0 1 2\n0 1 inner\n1 2 outer\n")
    result = runner.invoke(main, ["solve", "--shell", "1,2", "--mesh", str(bad)])
    assert result.exit_code == 3
    assert "assembly" in result.output


def test_mesh_command(runner, tmp_path):
    path = tmp_path / "shell.mesh"
    result = runner.invoke(main, ["mesh", "--shell", "1,2", "--n-radial", "4", "--n-angular", "16",
                                  "--output", str(path)])
    assert result.exit_code == 0, result.output
    assert "80 vertices, 128 triangles" in result.output
    assert path.read_text().startswith("annular-mesh v1\n")


def _written_mesh(runner, tmp_path):
    path = tmp_path / "shell.mesh"
    result = runner.invoke(main, ["mesh", "--shell", "1,2", *SMALL_MESH, "--output", str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.mark.parametrize("refine", ["0", "1"])
def test_solve_on_saved_mesh_matches_generated(runner, tmp_path, refine):
    path = _written_mesh(runner, tmp_path)
    generated = runner.invoke(main, ["solve", "--shell", "1,2", *SMALL_MESH, "--refine", refine])
    saved = runner.invoke(main, ["solve", "--shell", "1,2", "--mesh", str(path), "--refine", refine])
    assert generated.exit_code == 0, generated.output
    assert saved.exit_code == 0, saved.output
    assert saved.output == generated.output
    assert "sigma_beta" in saved.output


def test_refine_applies_to_saved_mesh(runner, tmp_path):
    path = _written_mesh(runner, tmp_path)
    coarse = runner.invoke(main, ["solve", "--shell", "1,2", "--mesh", str(path)])
    fine = runner.invoke(main, ["solve", "--shell", "1,2", "--mesh", str(path), "--refine", "1"])
    coarse_lines = dict(line.split() for line in coarse.output.splitlines())
    fine_lines = dict(line.split() for line in fine.output.splitlines())
    assert int(fine_lines["n_vertices"]) > int(coarse_lines["n_vertices"])
    assert float(fine_lines["h"]) < float(coarse_lines["h"])


def _failed_checks(path):
    return int((pd.read_csv(path)["verdict"] != "pass").sum())


def test_beta_sweep_command(runner, tmp_path):
    result = runner.invoke(main, ["sweep", "--beta", "1e-2:1e2:5", "--shell", "1,2", *SMALL_MESH,
                                  "--output", str(tmp_path)])
    assert result.exit_code == _failed_checks(tmp_path / "beta_sweep_checks.csv"), result.output
    table = pd.read_csv(tmp_path / "beta_sweep.csv")
    assert len(table) == 5
    assert (tmp_path / "beta_sweep.svg").read_text().lstrip().startswith("<?xml")
    assert (tmp_path / "h1_distance.svg").exists()


def test_radius_sweep_command(runner, tmp_path):
    result = runner.invoke(main, ["sweep", "--radius", "1,0.5", "--shell", "1,2", *SMALL_MESH,
                                  "--output", str(tmp_path), "--format", "csv"])
    assert result.exit_code == _failed_checks(tmp_path / "radius_sweep_checks.csv"), result.output
    assert list(pd.read_csv(tmp_path / "radius_sweep.csv")["r"]) == [1.0, 0.5]


def test_sweep_exit_counts_failed_checks(runner, tmp_path):
    # a hole barely shrinking cannot show degeneration
    result = runner.invoke(main, ["sweep", "--radius", "1.5,1.4", "--shell", "1,2", *SMALL_MESH,
                                  "--output", str(tmp_path), "--format", "csv"])
    failed = _failed_checks(tmp_path / "radius_sweep_checks.csv")
    assert failed >= 1
    assert result.exit_code == failed
    assert "sweep checks failed" in result.output


def test_sweep_needs_one_mode(runner):
    assert runner.invoke(main, ["sweep", "--shell", "1,2"]).exit_code == 2


def test_convergence_command(runner, tmp_path):
    result = runner.invoke(main, ["convergence", "--shell", "1,2", "--levels", "2", *SMALL_MESH,
                                  "--output", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "fitted order" in result.output
    assert len(pd.read_csv(tmp_path / "convergence.csv")) == 2


def test_convergence_on_general_domain(runner):
    result = runner.invoke(main, ["convergence", "--domain", str(FIXTURES / "ellipse.json"), "--levels", "3",
                                  *SMALL_MESH])
    assert result.exit_code == 0, result.output
    assert "sigma_beta_error" in result.output


def test_verify_needs_one_source(runner):
    assert runner.invoke(main, ["verify"]).exit_code == 2


def test_verify_fixture(runner, tmp_path):
    result = runner.invoke(main, ["verify", "--fixture", str(FIXTURES / "shell12.json"), "--output", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = pd.read_csv(tmp_path / "report.csv")
    assert set(report["verdict"]) == {"pass"}


def test_default_suite_is_deterministic(runner, tmp_path):
    first = runner.invoke(main, ["verify", "--suite", "default", "--output", str(tmp_path / "one")])
    second = runner.invoke(main, ["verify", "--suite", "default", "--output", str(tmp_path / "two")])
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output
    assert (tmp_path / "one" / "report.csv").read_bytes() == (tmp_path / "two" / "report.csv").read_bytes()
