"""Shared fixtures: a seeded generator, an in-memory call-record sink and
a clean run-log configuration around every test."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from ptspectra.configure import reset as reset_run_log
from ptspectra.logger import Logger, set_default_logger
from ptspectra.sinks import MemorySink


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture()
def memory_sink():
    """Default logger at DEBUG writing into a :class:`MemorySink`."""
    sink = MemorySink()
    logger = Logger(name="ptspectra-test", level="DEBUG", sinks=[sink], propagate_stdlib=False)
    set_default_logger(logger)
    yield sink
    logger.close()
    set_default_logger(None)


@pytest.fixture(autouse=True)
def _fresh_run_log(monkeypatch):
    monkeypatch.delenv("PT_SPECTRA_LEVEL", raising=False)
    monkeypatch.delenv("PT_SPECTRA_LOG_SINKS", raising=False)
    monkeypatch.delenv("PT_SPECTRA_THREADS", raising=False)
    reset_run_log()
    stdlib = logging.getLogger("ptspectra")
    stdlib.handlers.clear()
    stdlib.propagate = True
    stdlib.setLevel(logging.NOTSET)
    set_default_logger(Logger(name="ptspectra-test", level="WARNING", propagate_stdlib=False))
    yield
    reset_run_log()
