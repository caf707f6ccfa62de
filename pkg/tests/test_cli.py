import csv
import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pdmosc import __version__
from pdmosc.cli import main
from pdmosc.config import EXPERIMENTS, RunConfig, merge, params_from_dict
from pdmosc.errors import ConfigError
from pdmosc.figures import FigureDataset, build_figure, figure_manifest, resolve_figure_ids
from pdmosc.params import ModelParams
from pdmosc.quantum import energy_level


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    r = list(csv.reader(io.StringIO(text)))
    return r[0], [[float(v) for v in row] for row in r[1:]]


class TestCommands:
    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0 and __version__ in out

    def test_spectrum_lists_bound_states(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--gamma-sigma0", "0.3", "--hbar", "1", "--m0", "1", "--omega0", "1")
        assert code == 0
        header, data = rows(out)
        assert len(data) == 11
        P = ModelParams.from_gamma_sigma0(0.3)
        col = [h.split(" ")[0] for h in header]
        E = [r[col.index("E_n")] for r in data]
        np.testing.assert_allclose(E, [energy_level(P, n) for n in range(11)], rtol=1e-15)
        assert {"n", "T", "V"} <= set(col)

    def test_classical_orbit_columns(self, capsys):
        code, out, _ = run(capsys, "classical-orbit", "--gammaA0", "0.4", "--periods", "3")
        assert code == 0
        header, data = rows(out)
        names = [h.split(" ")[0] for h in header]
        assert names[1:] == ["t", "x", "p", "x_gamma", "Pi_gamma"]
        assert data[0][2] == pytest.approx(1 / 0.6)

    def test_orbit_needs_amplitude(self, capsys):
        code, _, err = run(capsys, "phase-portrait")
        assert code == 1 and "gammaA0" in err

    @pytest.mark.parametrize("argv", [
        ["eigenfunction", "--gamma-sigma0", "0.3", "--n", "0", "--n", "2", "--samples", "50"],
        ["phase-portrait", "--gammaA0", "0.2", "--gammaA0", "1.5", "--samples", "40"],
        ["morse-catalog", "--points", "20", "--seed", "1"],
        ["coherent-evolve", "--gamma-sigma0", "0.4", "--alpha", "0.5+0.2j", "--samples", "30"],
        ["cat-evolve", "--gamma-sigma0", "0.1", "--alpha", "1.2", "--parity", "odd", "--samples", "20",
         "--time-samples", "3"],
        ["uncertainties", "--sweep", "0", "--sweep", "0.3", "--n", "1"],
    ])
    def test_experiments_emit_finite_tables(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 0, err
        header, data = rows(out)
        assert data and all(len(r) == len(header) for r in data)
        assert np.all(np.isfinite(np.array(data)))

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--gamma-sigma0", "1.0", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and len(doc["rows"]) == 1

    def test_deterministic(self, capsys):
        argv = ["coherent-evolve", "--gamma-sigma0", "0.2", "--alpha", "0.3j", "--samples", "25"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_domain_error_names_parameter(self, capsys):
        code, _, err = run(capsys, "spectrum", "--gamma-sigma0", "2.0")
        assert code == 2 and "parameter" in err
        code, _, err = run(capsys, "spectrum", "--m0", "-1")
        assert code == 2 and "m0" in err

    def test_missing_required_option(self, capsys):
        code, _, err = run(capsys, "cat-evolve", "--samples", "3")
        assert code == 1 and "alpha" in err

    def test_cat_parity_defaults_to_even(self, capsys):
        base = ["cat-evolve", "--alpha", "0.8", "--samples", "5", "--time-samples", "2"]
        assert run(capsys, *base)[1] == run(capsys, *base, "--parity", "even")[1]

    def test_usage_errors(self, capsys):
        assert run(capsys, "spectrum", "--bogus")[0] == 1
        assert run(capsys, "nonsense")[0] == 1
        assert run(capsys, "coherent-evolve", "--alpha", "one")[0] == 1

    def test_output_file_and_env_dir(self, capsys, tmp_path, monkeypatch):
        target = tmp_path / "a" / "out.csv"
        assert run(capsys, "spectrum", "--gamma-sigma0", "0.3", "-o", str(target))[0] == 0
        assert target.read_text().startswith("n")
        monkeypatch.setenv("PDMOSC_OUTPUT_DIR", str(tmp_path))
        assert run(capsys, "spectrum", "--gamma-sigma0", "0.3", "--format", "json")[0] == 0
        assert json.loads((tmp_path / "spectrum.json").read_text())["figure_id"] == "spectrum"

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"experiment": "spectrum", "params": {"gamma_sigma0": 1.0}}))
        _, out, _ = run(capsys, "spectrum", "--config", str(cfg))
        assert len(rows(out)[1]) == 1
        _, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--gamma-sigma0", "0.3")
        assert len(rows(out)[1]) == 11

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert run(capsys, "spectrum", "--config", str(cfg))[0] == 1
        cfg.write_text(json.dumps({"experiment": "cat-evolve"}))
        assert run(capsys, "spectrum", "--config", str(cfg))[0] == 1
        assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.json"))[0] == 1

    def test_manifest(self, capsys):
        code, out, _ = run(capsys, "manifest")
        ids = set(json.loads(out))
        assert code == 0
        assert {"fig1a", "fig2f", "fig5", "fig9", "fig11f"} <= ids
        assert all(i.startswith("fig") for i in ids)

    def test_figure_command(self, capsys, tmp_path):
        code, out, _ = run(capsys, "figure", "fig6", "--output-dir", str(tmp_path))
        assert code == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["fig6a.csv", "fig6b.csv"]

    def test_verify_subset(self, capsys, tmp_path):
        report = tmp_path / "r.json"
        code, out, _ = run(capsys, "verify", "--criteria", "1", "--criteria", "3", "--json-report", str(report))
        assert code == 0
        assert out.count("[PASS]") == 2
        doc = json.loads(report.read_text())
        assert [c["criterion"] for c in doc["criteria"]] == [1, 3]

    def test_verify_known_failure_exit_codes(self, capsys):
        code, out, _ = run(capsys, "verify", "--criteria", "10")
        assert code == 0 and "[XFAIL]" in out
        assert run(capsys, "verify", "--criteria", "10", "--strict")[0] == 3

    def test_console_script(self):
        r = subprocess.run([sys.executable, "-m", "pdmosc", "spectrum", "--gamma-sigma0", "1.0"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and len(r.stdout.splitlines()) == 2


class TestConfig:
    def test_round_trip(self):
        cfg = RunConfig(ModelParams.from_gamma_sigma0(0.3, m0=2.0), "coherent-evolve",
                        {"alpha": "0.5+0.1j", "samples": 10}, "out.csv", "json")
        again = RunConfig.from_json(cfg.to_json())
        assert again.to_dict() == cfg.to_dict()
        assert RunConfig.from_json(again.to_json()).to_json() == cfg.to_json()

    def test_experiments(self):
        assert len(EXPERIMENTS) == 9
        with pytest.raises(ConfigError):
            RunConfig(ModelParams(), "plot")
        with pytest.raises(ConfigError):
            RunConfig(ModelParams(), "spectrum", format="xml")

    def test_params(self):
        assert params_from_dict({"gamma_sigma0": 0.3, "hbar": 4.0}).gamma_sigma0 == pytest.approx(0.3)
        with pytest.raises(ConfigError):
            params_from_dict({"gamma": 0.1, "gamma_sigma0": 0.1})
        with pytest.raises(ConfigError):
            params_from_dict({"mass": 1})
        with pytest.raises(ConfigError):
            params_from_dict({"m0": "heavy"})

    def test_merge_flags_win(self):
        cfg = merge({"params": {"gamma": 0.5}, "options": {"n_max": 3}}, "spectrum", {"gamma_sigma0": 0.2},
                    {"n_max": 1})
        assert cfg.params.gamma_sigma0 == pytest.approx(0.2)
        assert cfg.options["n_max"] == 1

    def test_merge_rejects_non_finite(self):
        with pytest.raises(ConfigError):
            merge({}, "classical-orbit", {}, {"periods": math.inf})

    def test_default_output_path(self, monkeypatch):
        monkeypatch.delenv("PDMOSC_OUTPUT_DIR", raising=False)
        assert RunConfig(ModelParams(), "spectrum").output_path() is None
        monkeypatch.setenv("PDMOSC_OUTPUT_DIR", "/tmp/x")
        assert RunConfig(ModelParams(), "spectrum", format="json").output_path() == os.path.join("/tmp/x",
                                                                                                "spectrum.json")


class TestFigures:
    def test_resolve(self):
        assert resolve_figure_ids("fig2") == [f"fig2{c}" for c in "abcdef"]
        assert resolve_figure_ids("fig5") == ["fig5"]
        with pytest.raises(ConfigError):
            resolve_figure_ids("fig99")

    def test_manifest_is_a_copy(self):
        m = figure_manifest()
        m["fig5"]["n"] = -1
        assert figure_manifest()["fig5"]["n"] == 20

    def test_every_panel_builds(self):
        for fid in figure_manifest():
            ds = build_figure(fid)
            assert ds.rows.shape[1] == len(ds.columns)
            assert ds.rows.shape[0] > 0
            assert np.all(np.isfinite(ds.rows))

    def test_dataset_validation(self):
        with pytest.raises(ValueError):
            FigureDataset("x", ["a", "b"], np.zeros((2, 3)))
        with pytest.raises(ValueError):
            FigureDataset("x", ["a"], np.array([[np.nan]]))

    def test_csv_round_trip(self, tmp_path):
        ds = build_figure("fig6a")
        p = tmp_path / "f.csv"
        ds.write(str(p), "csv")
        back = FigureDataset.from_csv("fig6a", p.read_text())
        assert back.columns == ds.columns
        np.testing.assert_array_equal(back.rows, ds.rows)

    def test_no_negative_zero(self):
        assert "-0.0," not in build_figure("fig1a").to_csv()
