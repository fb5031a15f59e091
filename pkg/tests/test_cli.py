"""Tests for the command line front end.

Commands run in-process through ``cli.main`` with configs written to
temporary files; a single subprocess test covers the installed entry
point.
"""

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from reflcop import cli
from reflcop.errors import NumericalError
from reflcop.spread import MultiBarrierParams, mb_survival, mb_survival_upper_bound


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(tmp_path, command, doc=None, flags=()):
    argv = [command, "--out", str(tmp_path)]
    if doc is not None:
        argv += ["--config", write_config(tmp_path, doc)]
    argv += list(flags)
    return cli.main(argv)


def read_table(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


class TestCopulaGrid:
    def test_reflection_grid(self, tmp_path):
        code = run(
            tmp_path,
            "copula-grid",
            {"family": "reflection", "t": 1.0, "h": 2.0},
            flags=["--resolution", "16"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "copula_grid.csv")
        assert header == ["u", "v", "C"]
        assert data.shape == (17 * 17, 3)
        report = json.loads((tmp_path / "copula_axioms.json").read_text())
        assert report["passed"] is True
        assert report["min_cell_volume"] >= -1e-9
        assert report["spec"]["family"] == "reflection"

    def test_independence_grid_is_product(self, tmp_path):
        code = run(
            tmp_path,
            "copula-grid",
            {"family": "gaussian", "rho": 0.0},
            flags=["--resolution", "8"],
        )
        assert code == 0
        _, data = read_table(tmp_path / "copula_grid.csv")
        np.testing.assert_allclose(data[:, 2], data[:, 0] * data[:, 1], atol=1e-12)

    def test_manifest(self, tmp_path):
        run(tmp_path, "copula-grid", {"family": "frechet_upper"})
        doc = json.loads((tmp_path / "manifest.json").read_text())
        assert doc["command"] == "copula-grid"
        assert doc["outputs"] == ["copula_grid.csv", "copula_axioms.json"]
        assert doc["seed"] == 0
        assert doc["config_digest"] == cli.config_digest(doc["config"])

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            code = cli.main(
                [
                    "copula-grid",
                    "--out",
                    str(out),
                    "--resolution",
                    "12",
                    "--config",
                    write_config(tmp_path, {"family": "patchwork",
                                            "eta": 0.5, "rho": 0.9}),
                ]
            )
            assert code == 0
        for name in ("copula_grid.csv", "copula_axioms.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_unknown_family_is_usage_error(self, tmp_path, capsys):
        assert run(tmp_path, "copula-grid", {"family": "nope"}) == 2
        assert "family" in capsys.readouterr().err

    def test_bad_params_are_usage_errors(self, tmp_path):
        assert run(tmp_path, "copula-grid", {"family": "gaussian", "rho": 2.0}) == 2
        assert run(tmp_path, "copula-grid", {"family": "reflection", "t": 1.0}) == 2
        assert run(tmp_path, "copula-grid", {"family": "gaussian", "rho": 0.1,
                                             "bogus": 1}) == 2


class TestSurvival:
    def test_analytic_matches_library(self, tmp_path):
        code = run(
            tmp_path,
            "survival",
            {"n": 1, "t": 1.0, "x_min": 0.0, "x_max": 0.5, "resolution": 5},
        )
        assert code == 0
        header, data = read_table(tmp_path / "survival_analytic.csv")
        assert header == ["x", "p"]
        params = MultiBarrierParams(nu=0.0, eta=0.5, rho=0.9)
        np.testing.assert_allclose(
            data[:, 1], mb_survival(1, 1.0, data[:, 0], params), rtol=0, atol=1e-15
        )

    def test_analytic_list_writes_one_file_per_n(self, tmp_path):
        code = run(tmp_path, "survival", {"n": [0, 5], "resolution": 4})
        assert code == 0
        doc = json.loads((tmp_path / "manifest.json").read_text())
        assert doc["outputs"] == [
            "survival_analytic_n0.csv",
            "survival_analytic_n5.csv",
        ]

    def test_zero_rho_curves_do_not_depend_on_n(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        cfg = {"rho": 0.0, "resolution": 6}
        cli.main(["survival", "--out", str(a),
                  "--config", write_config(tmp_path, dict(cfg, n=0))])
        cli.main(["survival", "--out", str(b),
                  "--config", write_config(tmp_path, dict(cfg, n=7), "c2.json")])
        assert (a / "survival_analytic.csv").read_bytes() == (
            b / "survival_analytic.csv"
        ).read_bytes()

    def test_mc_mode(self, tmp_path):
        code = run(
            tmp_path,
            "survival",
            {"n": "limit", "t": 1.0, "resolution": 4, "dt": 0.01},
            flags=["--mode", "mc", "--paths", "2000"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "survival_mc.csv")
        assert header == ["x", "p", "lo99", "hi99"]
        assert np.all(data[:, 2] <= data[:, 1]) and np.all(data[:, 1] <= data[:, 3])

    def test_both_mode_joins_curves(self, tmp_path):
        code = run(
            tmp_path,
            "survival",
            {"n": 1, "t": 1.0, "x_max": 0.5, "resolution": 2, "dt": 0.01},
            flags=["--mode", "both", "--paths", "4000"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "survival_both.csv")
        assert header == ["x", "p_analytic", "p_mc", "lo99", "hi99"]
        assert np.max(np.abs(data[:, 1] - data[:, 2])) < 0.05

    def test_local_corr_requires_mc(self, tmp_path):
        assert run(tmp_path, "survival", {"model": "local_corr"}) == 2
        code = run(
            tmp_path,
            "survival",
            {"model": "local_corr", "resolution": 3, "dt": 0.01},
            flags=["--mode", "mc", "--paths", "1000"],
        )
        assert code == 0

    def test_usage_errors(self, tmp_path):
        assert run(tmp_path, "survival", {"n": [1], "dt": 0.01},
                   flags=["--mode", "mc"]) == 2
        assert run(tmp_path, "survival", {"x_min": 1.0, "x_max": 0.0}) == 2
        assert run(tmp_path, "survival", {"n": -2}) == 2
        assert run(tmp_path, "survival", {"eta": -1.0}) == 2


class TestSimulate:
    def test_reflection_paths(self, tmp_path):
        code = run(
            tmp_path,
            "simulate",
            {"model": "reflection", "h": 0.1, "t": 1.0, "dt": 0.01,
             "snapshots": [0.5, 1.0]},
            flags=["--paths", "3", "--seed", "11"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "paths.csv")
        assert header == ["path_id", "t", "X", "Y"]
        assert data.shape == (3 * 3, 4)
        np.testing.assert_allclose(np.unique(data[:, 1]), [0.0, 0.5, 1.0])

    def test_missing_h_is_usage_error(self, tmp_path):
        assert run(tmp_path, "simulate", {"model": "reflection"}) == 2

    def test_bad_model_is_usage_error(self, tmp_path):
        assert run(tmp_path, "simulate", {"model": "heston"}) == 2
        assert run(tmp_path, "simulate", {}) == 2

    def test_snapshot_thinning(self, tmp_path):
        code = run(
            tmp_path,
            "simulate",
            {"model": "multibarrier", "t": 1.0, "dt": 0.01, "snapshot_count": 5},
            flags=["--paths", "2"],
        )
        assert code == 0
        _, data = read_table(tmp_path / "paths.csv")
        np.testing.assert_allclose(
            np.unique(data[:, 1]), [0.0, 0.2, 0.4, 0.6, 0.8, 1.0], atol=1e-12
        )

    def test_commodity_paths(self, tmp_path):
        code = run(
            tmp_path,
            "simulate",
            {"model": "commodity", "t": 0.25, "dt": 0.0025, "product": "1MAH",
             "dependence": 0.3, "snapshots": [0.25]},
            flags=["--paths", "4"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "paths.csv")
        assert header == ["path_id", "t", "fE", "fG", "spread"]
        np.testing.assert_allclose(
            data[:, 4], data[:, 2] - data[:, 3], rtol=0, atol=1e-12
        )

    def test_commodity_offset_beyond_horizon(self, tmp_path):
        code = run(
            tmp_path,
            "simulate",
            {"model": "commodity", "t": 0.25, "dt": 0.0025, "product": "9MAH"},
            flags=["--paths", "2"],
        )
        assert code == 3

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        cfg = write_config(
            tmp_path,
            {"model": "multibarrier", "t": 1.0, "dt": 0.01, "n": 2,
             "snapshot_count": 10},
        )
        for out in (a, b):
            assert cli.main(
                ["simulate", "--out", str(out), "--paths", "5", "--seed", "3",
                 "--config", cfg]
            ) == 0
        assert (a / "paths.csv").read_bytes() == (b / "paths.csv").read_bytes()
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


class TestCalibrate:
    CFG = {"target": 0.35, "z": 0.25, "eta": 0.5, "nu": 0.0, "t": 20.0}

    def test_round_trip(self, tmp_path):
        code = run(tmp_path, "calibrate", self.CFG)
        assert code == 0
        doc = json.loads((tmp_path / "calibration.json").read_text())
        assert set(doc) == {"rho", "achieved", "iterations", "valid_range"}
        assert abs(doc["achieved"] - 0.35) < 1e-6
        assert -1.0 <= doc["rho"] <= 1.0

    def test_stdout_carries_result(self, tmp_path, capsys):
        run(tmp_path, "calibrate", self.CFG)
        out = capsys.readouterr().out
        start = out.index("{")
        end = out.rindex("}") + 1
        doc = json.loads(out[start:end])
        assert abs(doc["achieved"] - 0.35) < 1e-6

    def test_target_at_range_maximum(self, tmp_path):
        upper = float(mb_survival_upper_bound(0.25, 20.0, 0.5))
        code = run(tmp_path, "calibrate", dict(self.CFG, target=upper))
        assert code == 0
        doc = json.loads((tmp_path / "calibration.json").read_text())
        assert doc["rho"] == 1.0

    def test_out_of_range_exits_3(self, tmp_path, capsys):
        code = run(tmp_path, "calibrate", dict(self.CFG, target=0.99))
        assert code == 3
        err = capsys.readouterr().err
        assert "valid range" in err
        assert not (tmp_path / "calibration.json").exists()

    def test_missing_target_is_usage_error(self, tmp_path):
        cfg = {k: v for k, v in self.CFG.items() if k != "target"}
        assert run(tmp_path, "calibrate", cfg) == 2

    def test_bad_barriers_exit_3(self, tmp_path):
        assert run(tmp_path, "calibrate", dict(self.CFG, z=0.7)) == 3


class TestEmpiricalCopula:
    def test_multibarrier_grid(self, tmp_path):
        code = run(
            tmp_path,
            "empirical-copula",
            {"model": "multibarrier", "t": 1.0, "dt": 0.01},
            flags=["--paths", "500", "--resolution", "10"],
        )
        assert code == 0
        header, data = read_table(tmp_path / "empirical_copula.csv")
        assert header == ["u", "v", "C_emp"]
        assert data.shape == (11 * 11, 3)
        grid = data[:, 2].reshape(11, 11)
        assert grid[0].max() == 0.0 and grid[:, 0].max() == 0.0
        assert grid[-1, -1] == 1.0
        # margins are uniform up to the 1/N rank granularity
        np.testing.assert_allclose(grid[-1], np.linspace(0, 1, 11), atol=0.01)

    def test_reflection_requires_h(self, tmp_path):
        assert run(tmp_path, "empirical-copula", {"model": "reflection"}) == 2

    def test_too_few_paths(self, tmp_path):
        code = run(tmp_path, "empirical-copula", {"model": "local_corr"},
                   flags=["--paths", "50"])
        assert code == 2


class TestMainPlumbing:
    def test_unknown_command(self, capsys):
        assert cli.main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "copula-grid" in capsys.readouterr().out

    def test_missing_config_file(self, tmp_path):
        code = cli.main(
            ["survival", "--out", str(tmp_path), "--config",
             str(tmp_path / "absent.json")]
        )
        assert code == 2

    def test_config_must_be_object(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("[1, 2]", encoding="utf-8")
        code = cli.main(["survival", "--out", str(tmp_path), "--config", str(path)])
        assert code == 2

    def test_numerical_failure_maps_to_4(self, tmp_path, monkeypatch, capsys):
        def boom(cfg, out_dir):
            raise NumericalError("lost precision")

        monkeypatch.setitem(cli._COMMANDS, "survival", boom)
        assert cli.main(["survival", "--out", str(tmp_path)]) == 4
        assert "lost precision" in capsys.readouterr().err

    def test_console_entry_point(self, tmp_path):
        exe = shutil.which("reflcop")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run(
            [exe, "calibrate", "--out", str(tmp_path), "--config",
             write_config(tmp_path, TestCalibrate.CFG)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "\"rho\"" in proc.stdout

    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "reflcop.cli", "copula-grid", "--out",
             str(tmp_path), "--resolution", "4", "--config",
             write_config(tmp_path, {"family": "independence"})],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "copula_grid.csv").exists()
