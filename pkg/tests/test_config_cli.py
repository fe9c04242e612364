import filecmp
import os

import pytest

from smasim import cli
from smasim.config import (
    ConfigError, list_presets, parse_config, parse_snr_grid, preset_text, serialize_config,
)

MINIMAL = """
[scenario only]
scheme = SMA
experiment = ber
"""

TINY = """
[defaults]
experiment = ber
snr_db = 0, 10
trials = 3000
seed = 5

[scenario sma]
scheme = SMA

[scenario noma]
scheme = NOMA
"""


class TestParse:
    def test_minimal_defaults(self):
        (scn,) = parse_config(MINIMAL)
        assert (scn.Nt, scn.Nr, scn.M, scn.trials) == (4, 4, 4, 1_000_000)

    def test_power_split_rejected(self):
        with pytest.raises(ConfigError, match="power split must sum to 1") as err:
            parse_config(MINIMAL + "a1 = 0.3\na2 = 0.8\n")
        assert err.value.path == "scenario only"

    def test_unknown_key_has_path(self):
        with pytest.raises(ConfigError) as err:
            parse_config(MINIMAL + "colour = blue\n")
        assert err.value.path == "scenario only.colour"

    def test_bad_value_has_path(self):
        with pytest.raises(ConfigError) as err:
            parse_config(MINIMAL + "nt = four\n")
        assert err.value.path == "scenario only.nt"

    @pytest.mark.parametrize("text", [
        "not an ini", "[defaults]\nnt = 4\n", "[other]\nx = 1\n",
        MINIMAL + MINIMAL, "[defaults]\nbogus = 1\n" + MINIMAL,
        "[scenario a]\nexperiment = ber\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_fig2_expansion(self):
        sma, noma = parse_config(preset_text("fig2"))
        assert (sma.scheme, noma.scheme) == ("SMA", "NOMA")
        assert sma.master_seed == noma.master_seed
        assert sma.snr_grid_db == noma.snr_grid_db == tuple(float(s) for s in range(0, 21, 2))
        assert (sma.a1, sma.a2, sma.trials) == (0.2, 0.8, 1_000_000)

    def test_fig3_families(self):
        scns = parse_config(preset_text("fig3"))
        assert sorted((s.scheme, s.Nr) for s in scns) == sorted(
            (sch, n) for sch in ("SMA", "NOMA") for n in (2, 4, 8))
        assert all(s.Nt == s.Nr == s.M for s in scns)

    def test_fig4_targets(self):
        for s in parse_config(preset_text("fig4")):
            assert (s.target_rates.r1_target, s.target_rates.r2_target) == (2.0, 2.0)

    @pytest.mark.parametrize("name", ["fig2", "fig3", "fig4"])
    def test_round_trip(self, name):
        scns = parse_config(preset_text(name))
        assert parse_config(serialize_config(scns)) == scns

    def test_presets_listed(self):
        assert set(list_presets()) == {"fig2", "fig3", "fig4"}

    def test_snr_grid(self):
        assert parse_snr_grid("0:5:20") == (0.0, 5.0, 10.0, 15.0, 20.0)
        assert parse_snr_grid("0, 2.5,7") == (0.0, 2.5, 7.0)
        for bad in ("", "0:0:10", "10:1:0", "1:2"):
            with pytest.raises(ValueError):
                parse_snr_grid(bad)


def test_format_number():
    assert cli.format_number(0.1) == "0.1"
    assert cli.format_number(1 / 3) == "0.333333333"
    assert cli.format_number(1.23456789012e-7) == "1.23456789e-07"
    assert cli.format_number(float("nan")) == "nan"


@pytest.fixture()
def tiny_config(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(TINY)
    return str(path)


class TestRun:
    def test_files_and_header(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        assert cli.main(["run", "--config", tiny_config, "--out", str(out)]) == 0
        assert sorted(os.listdir(out)) == [
            "ber_noma_ue1.csv", "ber_noma_ue2.csv", "ber_sma_ue1.csv", "ber_sma_ue2.csv"]
        data = (out / "ber_sma_ue1.csv").read_bytes()
        assert data.startswith(b"snr_db,estimate,standard_error,trials_used,analytic\n")
        assert b"\r" not in data
        rows = data.decode().splitlines()[1:]
        assert [r.split(",")[0] for r in rows] == ["0", "10"]
        assert all(r.split(",")[3] == "3000" for r in rows)
        noma = (out / "ber_noma_ue1.csv").read_text().splitlines()[1]
        assert noma.endswith(",nan")

    def test_trials_override(self, tiny_config, tmp_path):
        assert cli.main(["run", "--config", tiny_config, "--trials", "1000", "--snr", "5",
                         "--out", str(tmp_path)]) == 0
        row = (tmp_path / "ber_sma_ue2.csv").read_text().splitlines()[1].split(",")
        assert row[0] == "5" and row[3] == "1000"

    def test_byte_identical_rerun(self, tiny_config, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["run", "--config", tiny_config, "--out", str(a)]) == 0
        assert cli.main(["run", "--config", tiny_config, "--out", str(b), "--workers", "2"]) == 0
        names = os.listdir(a)
        match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        assert sorted(match) == sorted(names) and not mismatch and not errors

    def test_invalid_config_exit_code(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text(MINIMAL + "a1 = 0.3\na2 = 0.8\n")
        assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 1
        assert cli.main(["validate", "--config", str(bad)]) == 1
        assert cli.main(["run", "--config", str(tmp_path / "missing.ini")]) == 1
        assert cli.main(["run", "--config", "fig2", "--snr", "x:y"]) == 1

    def test_runtime_failure_cleans_up(self, tiny_config, tmp_path, monkeypatch):
        real = cli.run_scenario

        def flaky(scn, workers=1):
            if scn.scheme == "NOMA":
                raise RuntimeError("boom")
            return real(scn, workers=workers)

        monkeypatch.setattr(cli, "run_scenario", flaky)
        assert cli.main(["run", "--config", tiny_config, "--out", str(tmp_path / "o")]) == 2
        assert os.listdir(tmp_path / "o") == []

    def test_validate_and_list(self, tiny_config, capsys):
        assert cli.main(["validate", "--config", tiny_config]) == 0
        assert cli.main(["validate", "--config", "fig3"]) == 0
        assert cli.main(["list-presets"]) == 0
        out = capsys.readouterr().out
        assert "ok\tsma\tSMA\tber" in out and "fig4\t" in out

    def test_sum_rate_names(self, tmp_path):
        rc = cli.RunConfig(config="fig3", out_dir=str(tmp_path), trials=500, snr_grid_db=(10.0,),
                           emit_plots=True)
        assert cli.run(rc) == 0
        names = set(os.listdir(tmp_path))
        assert {f"sum_rate_{s}_nr{n}.csv" for s in ("sma", "noma") for n in (2, 4, 8)} <= names
        assert "plot_fig3.py" in names


class TestPlotScripts:
    def _run(self, preset, tmp_path):
        rc = cli.RunConfig(config=preset, out_dir=str(tmp_path), trials=500, snr_grid_db=(0.0, 10.0),
                           emit_plots=True)
        assert cli.run(rc) == 0
        return (tmp_path / f"plot_{preset}.py").read_text()

    def test_fig2(self, tmp_path):
        text = self._run("fig2", tmp_path)
        compile(text, "plot_fig2.py", "exec")
        assert "LOG_Y = True" in text
        for name in ("ber_sma_ue1.csv", "ber_sma_ue2.csv", "ber_noma_ue1.csv", "ber_noma_ue2.csv"):
            assert name in text
        assert "union bound" in text and "min(v, 0.5)" in text

    def test_fig3(self, tmp_path):
        text = self._run("fig3", tmp_path)
        assert "LOG_Y = False" in text
        assert "SMA Nr=8" in text and "NOMA Nr=2" in text

    def test_fig4(self, tmp_path):
        text = self._run("fig4", tmp_path)
        assert "LOG_Y = True" in text
        assert "outage_sma_ue2.csv" not in text.split("NOTES")[0]
        assert "P_out = 0" in text

    def test_empty_rejected(self):
        from smasim.plotscripts import emit_plot_script
        with pytest.raises(ValueError):
            emit_plot_script([], "fig2")
        with pytest.raises(ValueError):
            emit_plot_script([{"file": "a.csv", "scheme": "SMA", "metric": "ber_ue1"}], "fig9")
