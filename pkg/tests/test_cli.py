import csv
import json
import math
import subprocess
import sys

import pytest

from dma_nearfield.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from dma_nearfield.figures import ConfigError, RunConfig, format_number, load_config, parse_number, sweep_values


def read_csv(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader(l for l in lines if not l.startswith("#")))
    return comments, rows


@pytest.fixture(scope="module")
def figures(tmp_path_factory):
    out = tmp_path_factory.mktemp("figs")
    for n in (1, 2, 3):
        assert main(["reproduce", "--figure", str(n), "--outdir", str(out), "--format", "json"]) == EXIT_OK
    return out


class TestParsing:
    @pytest.mark.parametrize("text,value", [("pi/3", math.pi / 3), ("2*pi", 2 * math.pi), ("-1e-3", -1e-3),
                                            ("0.5", 0.5), ("inf", math.inf)])
    def test_numbers(self, text, value):
        assert parse_number(text) == value

    @pytest.mark.parametrize("text", ["__import__('os')", "pi/0", "3 +", "x"])
    def test_bad_numbers(self, text):
        with pytest.raises(ValueError):
            parse_number(text)

    def test_sweep(self):
        assert list(sweep_values(0, 10, 0.25))[-1] == 10.0
        assert len(sweep_values(0, 15, 0.1)) == 151
        assert sweep_values(0, 1, 0.3).tolist() == [0.0, 0.3, 0.6, 0.9]

    def test_number_format(self):
        assert format_number(1.0) == "1.00000000"
        assert format_number(math.inf) == "inf"
        assert format_number(None) == "nan"
        assert format_number(True) == "1"
        assert format_number(-0.0) == "0.00000000"
        assert format_number(3) == "3"

    def test_config_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# comment\nN_e = 100\nlambda = 0.02  # trailing\n\nphi = pi/4\nalpha_list = 0, 3\nfit = yes\n")
        cfg = load_config(p)
        assert (cfg.N_e, cfg.lambda_, cfg.phi, cfg.alpha_list, cfg.fit) == (100, 0.02, math.pi / 4, (0.0, 3.0), True)

    @pytest.mark.parametrize("body,line,fragment", [
        ("N_e = 100\nbogus = 1\n", 2, "unknown key"),
        ("N_e 100\n", 1, "expected key = value"),
        ("\n\nN_e = 2.5\n", 3, "integer"),
        ("w_range = 0:1\n", 1, "start:stop:step"),
        ("dr_range = 0:10:-1\n", 1, "positive"),
    ])
    def test_config_diagnostics(self, tmp_path, body, line, fragment):
        p = tmp_path / "bad.cfg"
        p.write_text(body)
        with pytest.raises(ConfigError, match=rf"bad.cfg:{line}: .*{fragment}"):
            load_config(p)

    def test_invalid_values_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig(mode="paraxial")
        with pytest.raises(ConfigError):
            RunConfig(N_e=0)
        with pytest.raises(ConfigError):
            RunConfig(delta=1.0)


class TestReproduce:
    def test_files(self, figures):
        names = {p.name for p in figures.iterdir()}
        for n in (1, 2, 3):
            assert {f"fig{n}.csv", f"fig{n}.plt", f"fig{n}.manifest", f"fig{n}.json"} <= names
        assert "fig2_mse.csv" in names

    def test_every_column_documented(self, figures):
        for name in ("fig1.csv", "fig2.csv", "fig2_mse.csv", "fig3.csv"):
            comments, rows = read_csv(figures / name)
            documented = {c[2:].split(":", 1)[0] for c in comments}
            assert documented == set(rows[0])

    def test_fig1(self, figures):
        _, rows = read_csv(figures / "fig1.csv")
        assert len(rows) == 5 * 41
        assert sorted({float(r["w"]) for r in rows}) == pytest.approx([0, 1, 2, 4, 6], abs=1e-12)
        first = rows[0]
        assert first["gain_oracle"] == first["gain_lemma1"] == first["gain_lemma2"] == "1.00000000"
        for r in rows:
            if float(r["w"]) <= 2:
                assert abs(float(r["gain_oracle"]) - float(r["gain_lemma2"])) <= 0.02

    def test_fig2(self, figures):
        _, rows = read_csv(figures / "fig2.csv")
        assert {"x_model_published", "x_model_refit"} <= set(rows[0])
        for r in rows:
            if float(r["w"]) == 0:
                assert float(r["offset"]) == 0
        _, mse = read_csv(figures / "fig2_mse.csv")
        assert len(mse) == 8
        assert sum(float(r["mse_refit"]) for r in mse) <= sum(float(r["mse_published"]) for r in mse)

    def test_fig3(self, figures):
        _, rows = read_csv(figures / "fig3.csv")
        manifest = dict(l.split(" = ", 1) for l in (figures / "fig3.manifest").read_text().splitlines())
        assert len(rows) == len(sweep_values(*map(float, manifest["w_range"].split(":"))))
        first_inf = next(float(r["w"]) for r in rows if r["delta_plus"] == "inf")
        assert abs(first_inf - 10.3) <= 0.3
        for r in rows:
            if float(r["w"]) <= 10:
                assert 0.88 <= float(r["gain_minus"]) <= 0.92
                assert 0.88 <= float(r["gain_plus"]) <= 0.92
            if r["delta_plus"] == "inf":
                assert r["gain_plus"] == "nan"

    def test_json_mirror(self, figures):
        doc = json.loads((figures / "fig3.json").read_text())
        _, rows = read_csv(figures / "fig3.csv")
        recs = doc["depth"]["rows"]
        assert len(recs) == len(rows)
        assert recs[0]["delta_minus"] == float(rows[0]["delta_minus"])
        assert recs[-1]["delta_plus"] == "inf"

    def test_manifest_has_provenance(self, figures):
        text = (figures / "fig1.manifest").read_text()
        for key in ("tool_version", "generated_at", "wall_clock_s", "backend"):
            assert f"\n{key} = " in text
        assert "generated_at" not in (figures / "fig1.csv").read_text()

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_deterministic(self, figures, tmp_path, n):
        assert main(["reproduce", "--figure", str(n), "--outdir", str(tmp_path), "--format", "json"]) == EXIT_OK
        assert (tmp_path / f"fig{n}.csv").read_bytes() == (figures / f"fig{n}.csv").read_bytes()
        assert (tmp_path / f"fig{n}.json").read_bytes() == (figures / f"fig{n}.json").read_bytes()

    @pytest.mark.parametrize("n,command", [(1, "gain-curve"), (2, "xdelta"), (3, "depth")])
    def test_manifest_round_trip(self, figures, tmp_path, n, command):
        args = [command, "--config", str(figures / f"fig{n}.manifest"), "--stem", f"fig{n}", "--outdir", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert (tmp_path / f"fig{n}.csv").read_bytes() == (figures / f"fig{n}.csv").read_bytes()


class TestCommands:
    def test_overrides(self, tmp_path):
        assert main(["gain-curve", "--alpha-list", "0,2", "--dr-range", "0:1:0.5", "--phi", "pi/4",
                     "--outdir", str(tmp_path)]) == EXIT_OK
        _, rows = read_csv(tmp_path / "gain_curve.csv")
        assert len(rows) == 6
        assert "phi = 0.7853981633974483" in (tmp_path / "gain_curve.manifest").read_text()

    def test_cli_beats_config(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("r = 12\nw_range = 0:1:0.5\n")
        assert main(["depth", "--config", str(cfg), "--r", "20", "--outdir", str(tmp_path)]) == EXIT_OK
        assert "r = 20.0" in (tmp_path / "depth.manifest").read_text()

    def test_fit(self, tmp_path):
        assert main(["fit", "--outdir", str(tmp_path)]) == EXIT_OK
        _, coef = read_csv(tmp_path / "fit.csv")
        assert [r["index"] for r in coef] == [str(k) for k in range(9)]
        _, mse = read_csv(tmp_path / "fit_mse.csv")
        for r in mse:
            assert 3.1 <= float(r["crossing_w_published"]) <= 3.3

    def test_env_outdir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DMA_NEARFIELD_OUTDIR", str(tmp_path / "env"))
        assert main(["depth", "--w-range", "0:0.2:0.1"]) == EXIT_OK
        assert (tmp_path / "env" / "depth.csv").exists()

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("N_e = 200\nbogus = 3\n")
        assert main(["depth", "--config", str(cfg), "--outdir", str(tmp_path)]) == EXIT_CONFIG
        assert "bad.cfg:2" in capsys.readouterr().err

    def test_bad_override_exit(self, tmp_path):
        assert main(["depth", "--N-e", "abc", "--outdir", str(tmp_path)]) == EXIT_CONFIG

    def test_numeric_failure_exit(self, tmp_path, capsys):
        assert main(["depth", "--theta", "0", "--w-range", "0:0:1", "--outdir", str(tmp_path)]) == EXIT_NUMERIC
        assert "undefined" in capsys.readouterr().err

    def test_no_root_exit(self, tmp_path):
        with pytest.warns(UserWarning):
            code = main(["depth", "--x-source", "numeric", "--delta", "0.001", "--w-range", "0:0:1",
                         "--outdir", str(tmp_path)])
        assert code == EXIT_NUMERIC

    def test_unknown_figure(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["reproduce", "--figure", "4", "--outdir", str(tmp_path)])
        assert info.value.code == 2

    def test_module_entry_point(self, tmp_path):
        out = subprocess.run([sys.executable, "-m", "dma_nearfield", "depth", "--w-range", "0:0.1:0.1",
                              "--outdir", str(tmp_path)], capture_output=True, text=True)
        assert out.returncode == 0
        assert out.stdout.splitlines()[0].endswith("depth.csv")
