"""Pydantic models validating one command-line invocation."""
from __future__ import annotations

import re
from pathlib import Path

from pydantic import BaseModel, Field, field_validator, model_validator

_INTEGER = re.compile(r"\d+\Z")
_LENGTHS = re.compile(r"(\d+)\.\.(\d+)(?::(\d+))?\Z")


def lex_token(text: str) -> str | int:
    """Unsigned integers lex as integers, everything else as a symbol."""
    return int(text) if _INTEGER.match(text) else text


class RunConfig(BaseModel):
    """A compile / parse / solutions invocation.

    Attributes:
        grammar: Path of the .chrg or .chr source.
        tokens: Input tokens, already lexed.
        lr: Force LR passivation on or off; None follows the grammar.
        lr_convention: 'rightmost' or 'leftmost'.
        dedup: Force idempotence rules on or off; None follows the grammar.
        eof: Append token(eof,k,k+1).
        trace: Print the engine trace to the diagnostics stream.
        solutions: Maximum number of final stores to enumerate.
        max_firings: Firing budget per run.
    """
    grammar: Path
    tokens: list[int | str] = Field(default_factory=list)
    lr: bool | None = None
    lr_convention: str = "rightmost"
    dedup: bool | None = None
    eof: bool = False
    trace: bool = False
    solutions: int = Field(default=10, ge=1)
    max_firings: int | None = Field(default=None, ge=1)

    @field_validator("grammar")
    @classmethod
    def validate_grammar(cls, v: Path) -> Path:
        if not v.is_file():
            raise ValueError(f"grammar file not found: {v}")
        return v

    @field_validator("tokens", mode="before")
    @classmethod
    def validate_tokens(cls, v: list) -> list:
        return [lex_token(t) if isinstance(t, str) else t for t in v]

    @field_validator("lr_convention")
    @classmethod
    def validate_lr_convention(cls, v: str) -> str:
        v = v.lower().strip()
        if v not in ("rightmost", "leftmost"):
            raise ValueError("lr_convention must be 'rightmost' or 'leftmost'")
        return v


class BenchConfig(BaseModel):
    """A benchmark over random strings.

    Attributes:
        grammar: Path of the grammar source.
        lengths: String lengths, strictly increasing.
        samples: Random strings per length.
        alphabet: Token symbols strings are drawn from.
        repetitions: Timed runs per string (the median is reported).
        workers: Threads running independent samples.
        seed: Random seed.
        dedup: Force idempotence rules on or off.
    """
    grammar: Path
    lengths: list[int] = Field(default_factory=lambda: list(range(8, 25, 2)))
    samples: int = Field(default=5, ge=1)
    alphabet: list[str] = Field(default_factory=lambda: ["a", "b"])
    repetitions: int = Field(default=3, ge=3)
    workers: int = Field(default=1, ge=1)
    seed: int = 0
    dedup: bool | None = None

    @field_validator("grammar")
    @classmethod
    def validate_grammar(cls, v: Path) -> Path:
        if not v.is_file():
            raise ValueError(f"grammar file not found: {v}")
        return v

    @field_validator("lengths")
    @classmethod
    def validate_lengths(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("at least one length is required")
        if any(n < 1 for n in v):
            raise ValueError("lengths must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("lengths must be strictly increasing")
        return v

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: list[str]) -> list[str]:
        v = [s.strip() for s in v if s.strip()]
        if not v:
            raise ValueError("alphabet cannot be empty")
        return v

    @model_validator(mode="after")
    def validate_fit(self) -> "BenchConfig":
        if len(self.lengths) < 2:
            raise ValueError("a slope needs at least two lengths")
        return self

    @classmethod
    def from_words(cls, grammar: str | Path, words: list[str], **defaults) -> "BenchConfig":
        """Build from ``key=value`` words such as ``lens=8..24:2 samples=5 alphabet=a,b``."""
        values: dict = dict(defaults)
        for word in words:
            key, sep, value = word.partition("=")
            if not sep or not value:
                raise ValueError(f"expected key=value, got '{word}'")
            if key == "lens":
                values["lengths"] = parse_lengths(value)
            elif key == "samples":
                values["samples"] = value
            elif key == "alphabet":
                values["alphabet"] = value.split(",")
            elif key == "reps":
                values["repetitions"] = value
            elif key == "workers":
                values["workers"] = value
            elif key == "seed":
                values["seed"] = value
            else:
                raise ValueError(f"unknown benchmark parameter '{key}'")
        return cls(grammar=grammar, **values)


def parse_lengths(text: str) -> list[int]:
    """``8..24`` (step 2), ``8..24:4``, or a comma list ``8,12,16``."""
    m = _LENGTHS.match(text)
    if m:
        low, high, step = int(m.group(1)), int(m.group(2)), int(m.group(3) or 2)
        if step < 1:
            raise ValueError("length step must be positive")
        return list(range(low, high + 1, step))
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"cannot read lengths from '{text}'") from None
