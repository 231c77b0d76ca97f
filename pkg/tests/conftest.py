"""Shared pytest fixtures for the chrg test suite.

Provides reusable fixtures for:
- Bundled demo grammar paths and sources
- Compiling and running grammar text in one call
- Settings isolated from the environment
"""
from __future__ import annotations

from pathlib import Path

import pytest
import structlog

import chrg.grammars
from chrg.config import Settings, get_settings
from chrg.services.engine import Engine
from chrg.services.grammar_compiler import compile_source, tokenize
from chrg.services.trace_logger import TraceLogger

DEMO_DIR = Path(chrg.grammars.__file__).parent


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Drop cached settings and any CHRG_ variables from the environment.

    structlog is reset afterwards: the CLI binds it to the captured stderr,
    which is closed once the test ends.
    """
    for key in list(Settings.model_fields):
        monkeypatch.delenv(f"CHRG_{key}", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    structlog.reset_defaults()


@pytest.fixture
def settings():
    return Settings(_env_file=None)


@pytest.fixture
def demo_path():
    """Path of a bundled demo grammar, e.g. ``demo_path("as.chrg")``."""

    def _path(name: str) -> Path:
        path = DEMO_DIR / name
        assert path.is_file(), f"missing demo grammar {name}"
        return path

    return _path


@pytest.fixture
def parse_with():
    """Compile grammar text and run it on tokens; returns (grammar, engine, result)."""

    def _run(text: str, tokens, *, trace: bool = False, **options):
        grammar, program = compile_source(text, **options)
        engine = Engine(program, trace=TraceLogger(enabled=trace))
        result = engine.run(tokenize(tokens, eof=grammar.eof))
        return grammar, engine, result

    return _run


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: timing-sensitive runs on larger inputs")
