import csv
import json

import pytest

from opint import cli, scenarios
from opint.errors import ConfigError, IoFailure, ScenarioFailure
from opint.scenarios import Outcome

FAST = ["--scenario", "naimark", "--seed", "3"]


def summary(path):
    data = json.loads(path.read_text())
    data.pop("wall_clock")
    return data


class TestConfig:
    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "run.ini"
        p.write_text("[run]\nscenario = lemma-a3\nseed = 9\n[params]\nell = pi\npairs = 1 1; 0 1\n"
                     "[tol]\nslope = 0.2\n")
        cfg = cli.load_config(p)
        assert cfg.seed == 9
        params, tols = cfg.resolved()
        assert params["pairs"] == ((1, 1), (0, 1))
        assert params["ell"] == pytest.approx(3.141592653589793)
        assert tols["slope"] == 0.2

    @pytest.mark.parametrize("sections", [
        {"run": {"scenario": "naimark"}, "extra": {}},
        {"run": {"scenario": "naimark", "colour": "red"}},
        {"run": {"scenario": "naimark"}, "params": {"trails": "3"}},
        {"run": {"scenario": "naimark"}, "tol": {"dilatoin": "1e-3"}},
        {"run": {"scenario": "nope"}},
        {"run": {}},
        {"run": {"scenario": "naimark", "seed": "-1"}},
        {"run": {"scenario": "naimark"}, "params": {"trials": "many"}},
    ])
    def test_rejects(self, sections):
        with pytest.raises(ConfigError):
            cli.config_from_sections(sections)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            cli.load_config(tmp_path / "absent.ini")

    def test_echo_includes_defaults(self):
        cfg = cli.ScenarioConfig("naimark", 1, {"trials": "4"})
        echo = cfg.echo()
        assert echo["params"]["trials"] == 4 and "d_max" in echo["params"]
        assert echo["tolerances"]["dilation"] == scenarios.SCHEMA["naimark"][1]["dilation"]


class TestMain:
    def test_success(self, tmp_path, capsys):
        assert cli.main(FAST + ["--out", str(tmp_path)]) == 0
        assert (tmp_path / "naimark-3-summary.json").exists()
        assert "all checks passed" in capsys.readouterr().out

    def test_tol_override_forces_failure(self, tmp_path):
        # a negative bound cannot be met by any defect
        code = cli.main(FAST + ["--out", str(tmp_path), "--tol.dilation=-1"])
        assert code == 1
        data = json.loads((tmp_path / "naimark-3-summary.json").read_text())
        assert data["config"]["tolerances"]["dilation"] == -1.0 and not data["passed"]

    def test_tol_separate_argument(self, tmp_path):
        assert cli.main(FAST + ["--out", str(tmp_path), "--tol.dilation", "1e-6"]) == 0

    @pytest.mark.parametrize("extra", [["--tol.unknown=1"], ["--tol.dilation"], ["--tol.=1"]])
    def test_config_errors_exit_two(self, tmp_path, extra, capsys):
        assert cli.main(FAST + ["--out", str(tmp_path)] + extra) == 2
        assert "error" in capsys.readouterr().err

    def test_unwritable_output_exits_two(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli.main(FAST + ["--out", str(blocker / "sub")]) == 2

    def test_strict(self, tmp_path):
        assert cli.main(FAST + ["--out", str(tmp_path), "--strict", "--tol.dilation=-1"]) == 1
        cfg = cli.ScenarioConfig("naimark", 3, tolerances={"dilation": -1.0})
        with pytest.raises(ScenarioFailure):
            cli.run_scenario(cfg, strict=True)

    def test_config_file_with_cli_override(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[run]\nscenario = naimark\nseed = 5\n[params]\ntrials = 3\n")
        assert cli.main(["--config", str(p), "--seed", "6", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "naimark-6-summary.json").exists()


class TestReports:
    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert cli.main(FAST + ["--out", str(out)]) == 0
        assert summary(a / "naimark-3-summary.json") == summary(b / "naimark-3-summary.json")
        ta = sorted(p.name for p in a.iterdir())
        assert ta == sorted(p.name for p in b.iterdir())
        for name in ta:
            if name.endswith(".csv"):
                assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_empty_scenario(self, tmp_path, monkeypatch):
        monkeypatch.setitem(scenarios.REGISTRY, "empty", lambda p, t, rng: Outcome())
        monkeypatch.setitem(scenarios.SCHEMA, "empty", ({}, {}))
        report = cli.run_scenario(cli.ScenarioConfig("empty"), tmp_path)
        assert report.passed and report.checks == []
        assert [p.name for p in tmp_path.iterdir()] == ["empty-0-summary.json"]
        assert summary(tmp_path / "empty-0-summary.json")["checks"] == []

    def test_moment_table_header(self, tmp_path):
        cfg = cli.ScenarioConfig("box-moments", 0, {"k_max": "2"})
        cli.run_scenario(cfg, tmp_path)
        with open(tmp_path / "box-moments-0-moments.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert header == ["state", "k", "value", "status", "slope"]

    def test_timing_checks_only_in_wall_clock(self, tmp_path):
        report = cli.run_scenario(cli.ScenarioConfig("naimark", 3, {"trials": 2}), tmp_path)
        timed = [c.name for c in report.checks if c.timing]
        s = report.summary()
        assert all(name in s["wall_clock"] for name in timed)
        assert all("value" not in c for c in s["checks"] if c["name"] in timed)
