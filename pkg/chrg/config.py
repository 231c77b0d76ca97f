"""Centralized toolkit configuration using Pydantic Settings.

Loads configuration from ``CHRG_``-prefixed environment variables and an
optional `.env` file with full validation, type coercion, and defaults.
Command-line flags override individual fields per invocation.

Usage:
    from chrg.config import get_settings

    settings = get_settings()  # cached singleton
    print(settings.LR_CONVENTION)
"""
from __future__ import annotations

from functools import lru_cache

from pydantic import Field, ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
_CHOICES = {
    "LOG_FORMAT": ("console", "json"),
    "LR_CONVENTION": ("rightmost", "leftmost"),
}


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables / .env file.

    Every field has a default; ``CHRG_DEDUP`` left unset means "use the
    grammar's own default" (on for propagation grammars, off otherwise).
    """

    model_config = SettingsConfigDict(
        env_prefix="CHRG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Logging ───────────────────────────────────────────────────────
    LOG_LEVEL: str = Field(default="INFO", description="Logging level (DEBUG/INFO/WARNING/ERROR)")
    LOG_FORMAT: str = Field(default="console", description="Log output format ('json' or 'console')")

    # ── Grammar compilation ───────────────────────────────────────────
    LR_CONVENTION: str = Field(
        default="rightmost",
        description="Which head stays active in LR mode ('rightmost' or 'leftmost')",
    )
    DEDUP: bool | None = Field(default=None, description="Force idempotence rules on or off")
    EOF: bool = Field(default=False, description="Append token(eof,k,k+1) to every token string")

    # ── Engine ────────────────────────────────────────────────────────
    TRACE: bool = Field(default=False, description="Print the engine trace to stderr")
    MAX_SOLUTIONS: int = Field(default=10, ge=1, description="Final stores printed by 'solutions'")
    MAX_FIRINGS: int | None = Field(default=None, ge=1, description="Abort a run after this many firings")

    # ── Benchmark ─────────────────────────────────────────────────────
    BENCH_REPETITIONS: int = Field(default=3, ge=3, le=50, description="Timed runs per sample (median taken)")
    BENCH_WORKERS: int = Field(default=1, ge=1, le=32, description="Threads running independent samples")
    BENCH_SEED: int = Field(default=0, description="Seed for random sample strings")

    # ── Validators ────────────────────────────────────────────────────

    @field_validator("LOG_LEVEL")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        level = v.upper().strip()
        if level not in _LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(_LEVELS)}, got '{v}'")
        return level

    @field_validator("LOG_FORMAT", "LR_CONVENTION")
    @classmethod
    def normalize_choice(cls, v: str, info: ValidationInfo) -> str:
        choice = v.lower().strip()
        allowed = _CHOICES[info.field_name]
        if choice not in allowed:
            raise ValueError(f"{info.field_name} must be one of {', '.join(allowed)}, got '{v}'")
        return choice


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings read once per process; tests reset it with ``get_settings.cache_clear()``."""
    return Settings()
