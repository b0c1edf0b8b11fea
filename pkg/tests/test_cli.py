import json
import pathlib

import numpy as np
import pytest

import periodicgame as pg
from periodicgame.cli import main

DATA = pathlib.Path(__file__).parent / "data"


class TestBuiltinRegistry:
    def test_exactly_four(self):
        names = [s.name for s in pg.builtin_experiments()]
        assert names == ["game2x2", "exp1", "exp2", "nocommon3"]

    def test_matrices_match_fixture_exactly(self):
        fixture = json.loads((DATA / "builtin_games.json").read_text())
        for spec in pg.builtin_experiments():
            expect = fixture[spec.name]
            assert spec.game.period == expect["period"]
            for got, want in zip(spec.game.matrices, expect["matrices"]):
                assert np.array_equal(got.entries, np.asarray(want, dtype=float))

    def test_spot_values(self):
        reg = {s.name: s for s in pg.builtin_experiments()}
        assert np.array_equal(reg["game2x2"].game.matrices[1].entries,
                              [[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(reg["exp2"].game.matrices[0].entries,
                              [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
        assert reg["nocommon3"].game.period == 3

    def test_unknown_name(self):
        with pytest.raises(pg.ConfigError):
            pg.experiment_by_name("exp9")


class TestParseConfig:
    def write(self, tmp_path, payload):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_minimal_valid(self, tmp_path):
        cfg = pg.parse_config(self.write(tmp_path, {
            "experiment": "game2x2", "algo": "extra", "eta": 0.1, "steps": 10000}))
        assert cfg.experiment == "game2x2"
        assert cfg.algo == "extra"

    def test_negative_eta_names_field(self, tmp_path):
        with pytest.raises(pg.ConfigError) as err:
            pg.parse_config(self.write(tmp_path, {"experiment": "game2x2", "eta": -0.5}))
        assert err.value.field == "eta"

    def test_unknown_field_named(self, tmp_path):
        with pytest.raises(pg.ConfigError) as err:
            pg.parse_config(self.write(tmp_path, {"experiment": "game2x2", "speed": 9}))
        assert err.value.field == "speed"

    def test_requires_exactly_one_source(self, tmp_path):
        with pytest.raises(pg.ConfigError):
            pg.parse_config(self.write(tmp_path, {"algo": "mwu"}))
        with pytest.raises(pg.ConfigError):
            pg.parse_config(self.write(tmp_path, {
                "experiment": "game2x2", "matrices": [[[0, 1], [1, 0]]]}))

    def test_bad_init_named(self, tmp_path):
        with pytest.raises(pg.ConfigError) as err:
            pg.parse_config(self.write(tmp_path, {
                "experiment": "game2x2", "init": [[0.7, 0.7], [0.5, 0.5]]}))
        assert err.value.field == "init"

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(pg.ConfigError):
            pg.parse_config(str(path))

    def test_inline_matrices_equal_builtin(self, tmp_path):
        cfg = pg.parse_config(self.write(tmp_path, {
            "matrices": [[[0, -1], [-1, 0]], [[0, 1], [1, 0]]], "period": 2}))
        game, spec = pg.experiments.resolve_game(cfg)
        builtin = pg.experiment_by_name("game2x2").game
        assert spec is None
        assert game.period == builtin.period
        for a, b in zip(game.matrices, builtin.matrices):
            assert np.array_equal(a.entries, b.entries)


class TestCliCommands:
    def test_no_command_prints_help(self, capsys):
        assert main([]) == 1
        assert "usage" in capsys.readouterr().out.lower()

    def test_backend_info(self, capsys):
        assert main(["--backend-info"]) == 0
        assert "kernel backend" in capsys.readouterr().out

    def test_experiment_list(self, capsys):
        assert main(["experiment", "--list"]) == 0
        out = capsys.readouterr().out
        for name in ("game2x2", "exp1", "exp2", "nocommon3"):
            assert name in out

    def test_experiment_run_writes_files(self, tmp_path, capsys):
        csv = tmp_path / "out.csv"
        svg = tmp_path / "out.svg"
        code = main(["experiment", "game2x2", "--steps", "200",
                     "--out-csv", str(csv), "--out-svg", str(svg)])
        assert code == 0
        assert csv.exists() and svg.exists()
        out = capsys.readouterr().out
        assert "common equilibrium" in out

    def test_simulate_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "experiment": "game2x2", "algo": "extra", "eta": 0.2,
            "steps": 100, "out_csv": str(tmp_path / "sim.csv")}))
        assert main(["simulate", "--config", str(cfg)]) == 0
        assert (tmp_path / "sim.csv").exists()

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"experiment": "nope"}))
        assert main(["simulate", "--config", str(cfg)]) == 1

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["experiment", "game2x2", "--algo", "bogus"])
        assert info.value.code == 1

    def test_analyze_commands(self, capsys):
        assert main(["analyze", "jacobian", "--eta", "0.1"]) == 0
        assert main(["analyze", "jacobian", "--eta", "0.1", "--boundary-a", "0.5"]) == 0
        assert main(["analyze", "eigen", "--eta", "0.1"]) == 0
        assert main(["analyze", "eigen", "--eta", "0.1", "--boundary-a", "0.3"]) == 0
        assert main(["analyze", "fixed-curve", "--eta", "0.05", "--samples", "5"]) == 0
        out = capsys.readouterr().out
        assert "residual" in out
        assert "central eigenvector" in out

    def test_verify_identities_passes(self, capsys):
        assert main(["verify", "identities", "--steps", "200"]) == 0

    def test_verify_increments_passes(self, capsys):
        assert main(["verify", "increments", "--steps", "500"]) == 0

    def test_verify_kl_monotone_passes(self, capsys):
        assert main(["verify", "kl-monotone", "--steps", "2000"]) == 0

    def test_verify_bregman_passes(self, capsys):
        assert main(["verify", "bregman", "--cases", "50"]) == 0

    def test_verify_orbit_mismatch_is_property_failure(self, capsys):
        code = main(["verify", "orbit", "--steps", "1000",
                     "--expect", "converged_point"])
        assert code == 3

    def test_verify_kl_monotone_without_common_eq_is_numerical(self, capsys):
        code = main(["verify", "kl-monotone", "--experiment", "nocommon3",
                     "--steps", "100"])
        assert code == 2

    def test_plot_roundtrip(self, tmp_path, capsys):
        csv = tmp_path / "run.csv"
        main(["experiment", "game2x2", "--steps", "100", "--out-csv", str(csv)])
        svg = tmp_path / "run.svg"
        assert main(["plot", "--in-csv", str(csv), "--out-svg", str(svg)]) == 0
        assert svg.exists()
        svg2 = tmp_path / "kl.svg"
        assert main(["plot", "--in-csv", str(csv), "--out-svg", str(svg2),
                     "--series", "kl", "--log-y"]) == 0

    def test_experiment_all(self, tmp_path, capsys):
        code = main(["experiment", "--all", "--steps", "50",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        for name in ("game2x2", "exp1", "exp2", "nocommon3"):
            assert (tmp_path / f"{name}.csv").exists()
