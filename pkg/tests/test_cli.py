import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from maxwell_elliptic import cli
from maxwell_elliptic.config import ConfigError, parse_config
from maxwell_elliptic.vtk_io import read_structured_points

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_unknown_key_reports_line():
    text = "[geometry]\nn_cells = 8\n\n[case]\nname = zero\nbogus = 3\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == 6
    assert "line 6" in str(exc.value)


def test_bad_value_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[solver]\n\ntol = fast\n")
    assert exc.value.line == 3


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[case]\nname = zero\nnot a key value line\n")
    assert exc.value.line == 3


@pytest.mark.parametrize("text", [
    "[geometry]\nn_cells = 16, 8\n",
    "[case]\nname = sphere\n",
    "[case]\nomega = 0\n",
    "[solver]\ntol = 2\n",
    "[nonsense]\nkey = 1\n",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_defaults_and_overrides():
    cfg = parse_config("", {"case.omega": "2.5", "geometry.n_cells": "8,16"})
    assert cfg.case.omega == 2.5
    assert cfg.geometry.n_cells == (8, 16)
    assert cfg.as_dict()["solver"]["tol"] == 1e-10


def test_example_configs_parse():
    for path in CONFIGS.glob("*.ini"):
        cli.load_config(path)


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[case]\nname = zero\nomega = -1\n")
    assert cli.main(["solve", str(bad), "--output", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["solve", str(tmp_path / "none.ini")]) == cli.EXIT_CONFIG


def test_convergence_needs_two_grids(tmp_path):
    assert cli.main(["convergence", "--n-cells", "8", "--output", str(tmp_path)]) == cli.EXIT_CONFIG


def test_zero_samples_is_usage_error(tmp_path):
    assert cli.main(["symbol-check", "--samples", "0", "--output", str(tmp_path)]) == cli.EXIT_CONFIG


def test_isotropic_symbol_check(tmp_path):
    code = cli.main(["symbol-check", "--samples", "1", "--isotropic", "--sigma-resolution", "16",
                     "--output", str(tmp_path)])
    assert code == cli.EXIT_OK
    with open(tmp_path / "symbol_check.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16 * 2 * 2
    for key in {(r["surface"], r["block"]) for r in rows}:
        vals = [float(r["min_singular_value"]) for r in rows if (r["surface"], r["block"]) == key]
        assert np.ptp(vals) <= 1e-12 * max(vals)
    summary = json.loads((tmp_path / "symbol_check.json").read_text())
    assert summary["verdict"] == "elliptic"


def test_random_symbol_check(tmp_path):
    code = cli.main(["symbol-check", "--samples", "5", "--seed", "2", "--surface", "boundary",
                     "--output", str(tmp_path)])
    assert code == cli.EXIT_OK
    summary = json.loads((tmp_path / "symbol_check.json").read_text())
    assert summary["min_singular_value"] > 1e-6


def test_zero_case(tmp_path):
    code = cli.main(["solve", "--n-cells", "8", "--set", "case.name=zero", "--output", str(tmp_path)])
    assert code == cli.EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    run = report["runs"][0]
    assert all(v == 0 for v in run["solve"]["groups"].values())
    assert run["compatibility"]["passed"]
    assert all(report["verdict"].values())


@pytest.fixture(scope="module")
def plane_wave_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("pw")
    code = cli.main(["convergence", str(CONFIGS / "plane_wave.ini"), "--output", str(out)])
    return code, out


def test_plane_wave_convergence_csv(plane_wave_run):
    code, out = plane_wave_run
    assert code == cli.EXIT_OK
    with open(out / "convergence.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["n_cells"]) for r in rows] == [8, 16]
    assert 1.7 <= float(rows[1]["order_field_error"]) <= 2.5


def test_vtk_round_trip(plane_wave_run):
    from maxwell_elliptic import DomainSpec, build_grid

    _, out = plane_wave_run
    data = read_structured_points(out / "fields_n8.vtk")
    assert data["dimensions"] == (9, 9, 9)
    assert np.allclose(data["spacing"], 0.125)
    g = build_grid(DomainSpec(((0, 0, 0), (1, 1, 1)), ((0.25,) * 3, (0.75,) * 3), 8))
    # x fastest in the file
    pts = np.stack(np.meshgrid(*g.axes, indexing="ij"), -1).transpose(2, 1, 0, 3).reshape(-1, 3)
    exact = np.exp(1j * np.sqrt(2) * pts[:, 2])
    assert np.abs(data["data"]["E_real"][:, 0] - exact.real).max() < 0.02
    assert np.abs(data["data"]["E_imag"][:, 0] - exact.imag).max() < 0.02
    assert set(np.unique(data["data"]["node_class"])) == {0, 1, 2, 3}
    for name in ("H_real", "H_imag", "alpha_real", "alpha_imag", "beta_real", "beta_imag"):
        assert name in data["data"]


def test_reruns_are_bit_identical(tmp_path):
    args = ["solve", "--n-cells", "8", "--set", "case.name=mms", "--set", "case.seed=3",
            "--output", str(tmp_path)]
    names = ("report.json", "fields_n8.vtk")
    assert cli.main(args) == cli.EXIT_OK
    first = [(tmp_path / n).read_bytes() for n in names]
    assert cli.main(args) == cli.EXIT_OK
    assert [(tmp_path / n).read_bytes() for n in names] == first


def test_beta0_injection_report(tmp_path):
    code = cli.main(["convergence", str(CONFIGS / "beta0_violation.ini"), "--n-cells", "8", "16",
                     "--output", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text())
    assert code == cli.EXIT_OK
    assert not report["verdict"]["data_compatible"]
    assert all("beta_0" in r["compatibility"]["flagged"] for r in report["runs"])
    b = [r["solve"]["beta_norm"] for r in report["runs"]]
    assert b[1] >= 0.5 * b[0]


def test_solver_failure_exit_code(tmp_path):
    code = cli.main(["solve", "--n-cells", "8", "--set", "solver.max_iter=3",
                     "--output", str(tmp_path)])
    assert code == cli.EXIT_SOLVER
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["verdict"]["solver_converged"] is False


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "maxwell_elliptic.cli", "symbol-check",
                           "--samples", "1", "--sigma-resolution", "4", "--output", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict: elliptic" in proc.stdout
