"""Tests for ptspectra.cli: commands, outputs, config files and exit codes."""

import json

import pytest
from click.testing import CliRunner

from ptspectra import __version__
from ptspectra.cli import cli, diagnostic, main, parse_pair
from ptspectra.errors import BracketError, ConvergenceError, InvalidInputError
from ptspectra.sinks import read_trajectory_csv


@pytest.fixture()
def runner():
    return CliRunner()


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------

class TestScanCommands:

    def test_matrix2x2_gain_csv(self, runner, tmp_path):
        out = tmp_path / "gain.csv"
        result = runner.invoke(cli, [
            "matrix2x2", "gain", "--e1", "0", "--e2", "2",
            "--eps", "0:1.5:0.1", "--threads", "1", "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        comments, rows = read_trajectory_csv(out)
        assert "threshold=1.0" in comments
        assert "command=matrix2x2 gain" in comments
        assert len(rows) == 32
        below = [r for r in rows if r.eps < 1.0]
        assert all(r.real_flag for r in below)
        assert not any(r.real_flag for r in rows if r.eps > 1.05)

    def test_output_independent_of_threads(self, runner, tmp_path):
        paths = []
        for threads in ("1", "4"):
            out = tmp_path / f"t{threads}.csv"
            result = runner.invoke(cli, [
                "matrix2x2", "detuned", "--e", "0", "--b", "1",
                "--eps", "0:1.5:0.05", "--threads", threads, "-o", str(out),
            ])
            assert result.exit_code == 0, result.output
            paths.append(out)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_threads_from_environment(self, runner, tmp_path):
        out = tmp_path / "env.csv"
        result = runner.invoke(
            cli,
            ["matrix2x2", "gain", "--e1", "0", "--e2", "2", "--eps", "0:0.2:0.1", "-o", str(out)],
            env={"PT_SPECTRA_THREADS": "2"},
        )
        assert result.exit_code == 0, result.output

    def test_scan_h3_json(self, runner, tmp_path):
        out = tmp_path / "h3.json"
        result = runner.invoke(cli, [
            "scan-h3", "--eps", "0", "--trunc", "16", "--format", "json", "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        values = [t["points"][0]["value"]["re"] for t in doc["trajectories"]]
        assert values == [1.0, 3.0, 5.0, 7.0, 9.0]
        assert all(t["points"][0]["conjugation_defect"] == 0.0 for t in doc["trajectories"])
        assert doc["_header"]["scan.truncation"] == 16

    def test_scan_h2_stdout(self, runner):
        result = runner.invoke(cli, [
            "scan-h2", "--omega1", "1", "--omega2", "1.4142135623730951",
            "--eps", "0,0.1", "--trunc", "6x6", "--levels", "2", "--threads", "1",
        ])
        assert result.exit_code == 0, result.output
        assert "label,eps,re_lambda" in result.output
        assert '"0,0",0.1,' in result.output

    def test_show_prints_table(self, runner, tmp_path):
        result = runner.invoke(cli, [
            "matrix2x2", "gain", "--e1", "0", "--e2", "2", "--eps", "0:0.2:0.1",
            "-o", str(tmp_path / "x.csv"), "--show",
        ])
        assert result.exit_code == 0, result.output
        assert "residual" in result.output


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class TestReportCommands:

    def test_rspe_two_level(self, runner, tmp_path):
        out = tmp_path / "rspe.json"
        result = runner.invoke(cli, ["rspe", "two-level", "--e1", "0", "--e2", "2", "-o", str(out)])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert doc["_header"]["command"] == "rspe two-level"
        assert doc["series"]["radius_estimate"] == pytest.approx(1.0, rel=0.05)
        assert doc["threshold"] == 1.0

    def test_rspe_lambda_pm(self, runner, tmp_path):
        out = tmp_path / "lpm.json"
        result = runner.invoke(cli, ["rspe", "lambda-pm", "--omega1", "1", "--omega2", "2", "-o", str(out)])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert doc["lambda_plus"]["coefficients"][0] == 8.0
        assert doc["lambda_plus"]["radius_estimate"] == pytest.approx(3.0, rel=0.05)
        assert doc["threshold"] == 3.0

    def test_rspe_h2(self, runner, tmp_path):
        out = tmp_path / "h2.json"
        result = runner.invoke(cli, [
            "rspe", "h2", "--omega1", "1", "--omega2", "2", "--trunc", "8x8", "--order", "4", "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert doc["truncation"] == [8, 8]
        assert doc["series"]["coefficients"][2] == pytest.approx(1.0 / 48.0, abs=1e-9)

    def test_threshold_gain(self, runner, tmp_path):
        out = tmp_path / "thr.json"
        result = runner.invoke(cli, [
            "threshold", "gain", "--e1", "0", "--e2", "2",
            "--real-end", "0.5", "--complex-end", "1.5", "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert abs(doc["eps_star"] - 1.0) <= 1e-8
        assert doc["closed_form_threshold"] == 1.0
        assert doc["pair"] == ["0", "1"]

    def test_converge_h3(self, runner, tmp_path):
        out = tmp_path / "conv.json"
        result = runner.invoke(cli, ["converge", "h3", "--eps", "0", "--sizes", "8,16", "-k", "2", "-o", str(out)])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert doc["levels"]["1"]["differences"] == [0.0]

    def test_certify_gain(self, runner, tmp_path):
        out = tmp_path / "cert.json"
        result = runner.invoke(cli, [
            "certify", "--model", "gain", "--e1", "0", "--e2", "2", "--label", "1", "--eps", "0.6",
            "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert doc["real"] is True
        assert doc["value"]["re"] == pytest.approx(1.8, abs=1e-12)

    def test_certify_several_labels(self, runner, tmp_path):
        out = tmp_path / "certs.json"
        result = runner.invoke(cli, [
            "certify", "--model", "gain", "--e1", "0", "--e2", "2", "--label", "1/0", "--eps", "0.6",
            "--jump-ratio", "0", "-o", str(out),
        ])
        assert result.exit_code == 0, result.output
        doc = _json(out)
        assert [c["label"] for c in doc["certificates"]] == ["1", "0"]
        assert doc["certificates"][1]["value"]["re"] == pytest.approx(0.2, abs=1e-12)
        assert doc["_header"]["scan.jump_ratio"] == 0.0


# ---------------------------------------------------------------------------
# Config files, logging and exit codes
# ---------------------------------------------------------------------------

class TestConfigAndExitCodes:

    def test_config_file_supplies_flags(self, runner, tmp_path):
        cfg = tmp_path / "gain.cfg"
        cfg.write_text("e1 = 0\ne2 = 2\neps = 0:0.5:0.25  # short grid\n", encoding="utf-8")
        out = tmp_path / "cfg.csv"
        result = runner.invoke(cli, ["matrix2x2", "gain", "--config", str(cfg), "-o", str(out)])
        assert result.exit_code == 0, result.output
        _, rows = read_trajectory_csv(out)
        assert sorted({r.eps for r in rows}) == [0.0, 0.25, 0.5]

    def test_flags_override_config_file(self, runner, tmp_path):
        cfg = tmp_path / "gain.cfg"
        cfg.write_text("e1=0\ne2=2\neps=0:0.5:0.25\n", encoding="utf-8")
        out = tmp_path / "cfg.csv"
        result = runner.invoke(cli, ["matrix2x2", "gain", "--config", str(cfg), "--eps", "0,0.1", "-o", str(out)])
        assert result.exit_code == 0, result.output
        _, rows = read_trajectory_csv(out)
        assert sorted({r.eps for r in rows}) == [0.0, 0.1]

    def test_unknown_config_key(self, runner, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour=blue\n", encoding="utf-8")
        result = runner.invoke(cli, ["matrix2x2", "gain", "--config", str(cfg)])
        assert result.exit_code == 1
        assert "ptspectra: error[config]:" in result.output
        assert "colour" in result.output

    def test_bracket_error_exits_1(self, runner):
        result = runner.invoke(cli, [
            "threshold", "gain", "--e1", "0", "--e2", "2", "--real-end", "0.1", "--complex-end", "0.5",
        ])
        assert result.exit_code == 1
        assert "ptspectra: error[config]:" in result.output

    def test_invalid_h3_grid_exits_1(self, runner):
        result = runner.invoke(cli, ["scan-h3", "--eps", "0:1.5:0.5", "--trunc", "8"])
        assert result.exit_code == 1
        assert "-1 < eps < 1" in result.output

    def test_numerical_error_exits_2(self, runner):
        result = runner.invoke(cli, ["certify", "--model", "h3", "--eps", "0.5", "--trunc", "4"])
        assert result.exit_code == 2
        assert "ptspectra: error[numerical]:" in result.output
        assert "eps=0.5" in result.output

    def test_run_log(self, runner, tmp_path):
        log_path = tmp_path / "run.jsonl"
        result = runner.invoke(cli, [
            "--log-level", "INFO", "--log-sink", f"jsonl:{log_path}",
            "rspe", "two-level", "--e1", "0", "--e2", "2", "-o", str(tmp_path / "r.json"),
        ])
        assert result.exit_code == 0, result.output
        names = [json.loads(line)["function_name"] for line in log_path.read_text(encoding="utf-8").splitlines()]
        assert "rspe_matrix" in names
        assert "cli.rspe" in names

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_main_usage_error_exits_1(self, capsys):
        assert main(["--no-such-flag"]) == 1
        assert "ptspectra: error[config]:" in capsys.readouterr().err

    def test_main_success(self, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["matrix2x2", "gain", "--e1", "0", "--e2", "2", "--eps", "0,0.1", "-o", str(out)]) == 0
        assert out.exists()

    def test_main_numerical_exit(self, capsys):
        assert main(["certify", "--model", "h3", "--eps", "0.5", "--trunc", "4"]) == 2


class TestHelpers:

    def test_parse_pair(self):
        assert parse_pair("0,0/1,0") == ((0, 0), (1, 0))

    def test_parse_pair_invalid(self):
        with pytest.raises(InvalidInputError):
            parse_pair("0-1")

    def test_diagnostic_formats(self):
        assert diagnostic(BracketError("bad bracket")) == "ptspectra: error[config]: bad bracket"
        text = diagnostic(ConvergenceError("drifted", eps=0.25, truncation="64"))
        assert text == "ptspectra: error[numerical]: drifted eps=0.25 trunc=64"
