"""Tests for environment-driven settings."""
from __future__ import annotations

import pytest
from pydantic import ValidationError

from chrg.config import Settings, get_settings


class TestSettings:
    def test_defaults(self, settings):
        assert settings.LOG_LEVEL == "INFO"
        assert settings.LR_CONVENTION == "rightmost"
        assert settings.DEDUP is None
        assert settings.MAX_SOLUTIONS == 10
        assert settings.BENCH_REPETITIONS == 3

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("CHRG_LOG_LEVEL", "debug")
        monkeypatch.setenv("CHRG_DEDUP", "false")
        monkeypatch.setenv("CHRG_LR_CONVENTION", " Leftmost ")
        s = Settings(_env_file=None)
        assert s.LOG_LEVEL == "DEBUG"
        assert s.DEDUP is False
        assert s.LR_CONVENTION == "leftmost"

    def test_invalid_log_level(self, monkeypatch):
        monkeypatch.setenv("CHRG_LOG_LEVEL", "loud")
        with pytest.raises(ValidationError, match="LOG_LEVEL"):
            Settings(_env_file=None)

    def test_repetitions_lower_bound(self, monkeypatch):
        monkeypatch.setenv("CHRG_BENCH_REPETITIONS", "2")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)

    def test_cached(self):
        assert get_settings() is get_settings()
