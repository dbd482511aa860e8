"""Tests for ptspectra.configure."""

import pytest

from ptspectra import configure, log_call, Logger
from ptspectra.configure import _parse_sink_spec
from ptspectra.errors import InvalidInputError
from ptspectra.logger import get_default_logger
from ptspectra.sinks import MemorySink, RunLogSink
from ptspectra.terminal import TerminalSink


# -- _parse_sink_spec --------------------------------------------------------

class TestParseSinkSpec:

    def test_jsonl(self, tmp_path):
        sink = _parse_sink_spec(f"jsonl:{tmp_path / 'run.jsonl'}")
        assert isinstance(sink, RunLogSink)

    def test_terminal(self):
        sink = _parse_sink_spec("terminal:color")
        assert isinstance(sink, TerminalSink)
        assert sink.format == "color"

    def test_terminal_unknown_format_falls_back(self):
        assert _parse_sink_spec("terminal:fancy").format == "ascii"

    def test_memory(self):
        assert isinstance(_parse_sink_spec("memory:"), MemorySink)

    def test_invalid_no_colon(self):
        with pytest.raises(InvalidInputError, match="Invalid sink spec"):
            _parse_sink_spec("jsonl")

    def test_missing_path(self):
        with pytest.raises(InvalidInputError, match="needs a file path"):
            _parse_sink_spec("jsonl:")

    def test_unknown_type(self):
        with pytest.raises(InvalidInputError, match="Unknown sink type"):
            _parse_sink_spec("sqlite:run.db")


# -- configure() -------------------------------------------------------------

class TestConfigure:

    def test_returns_logger(self):
        lgr = configure(propagate_stdlib=False)
        assert isinstance(lgr, Logger)
        assert lgr.level == "WARNING"
        assert get_default_logger() is lgr

    def test_idempotent_without_force(self):
        first = configure(propagate_stdlib=False)
        assert configure(level="DEBUG", propagate_stdlib=False) is first
        forced = configure(level="DEBUG", propagate_stdlib=False, force=True)
        assert forced is not first
        assert forced.level == "DEBUG"

    def test_sink_specs(self, tmp_path):
        lgr = configure(sinks=[f"jsonl:{tmp_path / 'run.jsonl'}"], propagate_stdlib=False)
        assert len(lgr.sinks) == 1
        assert isinstance(lgr.sinks[0], RunLogSink)

    def test_sink_instances(self):
        sink = MemorySink()
        lgr = configure(sinks=[sink], propagate_stdlib=False)
        assert lgr.sinks[0] is sink

    def test_env_level(self, monkeypatch):
        monkeypatch.setenv("PT_SPECTRA_LEVEL", "info")
        assert configure(propagate_stdlib=False).level == "INFO"

    def test_explicit_level_beats_env(self, monkeypatch):
        monkeypatch.setenv("PT_SPECTRA_LEVEL", "DEBUG")
        assert configure(level="ERROR", propagate_stdlib=False).level == "ERROR"

    def test_env_sinks(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PT_SPECTRA_LOG_SINKS", f"jsonl:{tmp_path / 'a.jsonl'}, memory:")
        lgr = configure(propagate_stdlib=False)
        assert [type(s) for s in lgr.sinks] == [RunLogSink, MemorySink]

    def test_explicit_sinks_beat_env(self, monkeypatch):
        monkeypatch.setenv("PT_SPECTRA_LOG_SINKS", "memory:")
        assert configure(sinks=[], propagate_stdlib=False).sinks == []

    def test_decorators_use_configured_logger(self):
        sink = MemorySink()
        configure(level="DEBUG", sinks=[sink], propagate_stdlib=False)

        @log_call
        def square(x):
            return x * x

        square(3)
        assert sink.records[0].return_summary == "9"

    def test_run_log_written(self, tmp_path):
        from ptspectra.linalg import eigenvalues

        path = tmp_path / "run.jsonl"
        configure(level="DEBUG", sinks=[f"jsonl:{path}"], propagate_stdlib=False)
        eigenvalues([[1.0, 0.0], [0.0, 2.0]])
        assert '"function_name": "eigenvalues"' in path.read_text(encoding="utf-8")
