"""Options and plumbing shared by the commands."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from chrg.config import Settings
from chrg.models.grammar import Grammar
from chrg.models.requests import RunConfig
from chrg.models.rules import Program
from chrg.services.engine import Engine
from chrg.services.grammar_compiler import compile_cfg
from chrg.services.trace_logger import TraceLogger
from chrg.syntax.reader import parse_grammar_source
from chrg.utils.exceptions import InputValidationError

_SWITCH = {"on": True, "off": False}


def add_grammar_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("grammar", type=Path, help="grammar source (.chrg or .chr)")
    parser.add_argument("--lr", action="store_const", const=True, default=None,
                        help="passivate every production as in ruleLR")
    parser.add_argument("--lr-convention", choices=("rightmost", "leftmost"), default=None,
                        help="which grammar symbol stays active in LR mode")
    parser.add_argument("--dedup", choices=tuple(_SWITCH), default=None,
                        help="force idempotence rules on or off")


def add_run_options(parser: argparse.ArgumentParser) -> None:
    add_grammar_options(parser)
    parser.add_argument("tokens", nargs="*", help="input tokens")
    parser.add_argument("--tokens-file", type=Path, default=None,
                        help="read tokens from a file, one per line")
    parser.add_argument("--eof", action="store_true", default=None, help="append token(eof,k,k+1)")
    parser.add_argument("--trace", action="store_true", default=None,
                        help="print the engine trace on stderr")
    parser.add_argument("--max-firings", type=int, default=None, help="abort after this many firings")
    parser.set_defaults(collect_extra="tokens")


def build_run_config(args: argparse.Namespace, settings: Settings, **extra) -> RunConfig:
    """Merge command-line flags over settings into a validated RunConfig."""
    tokens = list(getattr(args, "tokens", []) or [])
    tokens_file = getattr(args, "tokens_file", None)
    if tokens_file is not None:
        tokens.extend(read_tokens(tokens_file))

    dedup = _SWITCH[args.dedup] if args.dedup is not None else settings.DEDUP
    try:
        return RunConfig(
            grammar=args.grammar,
            tokens=tokens,
            lr=args.lr,
            lr_convention=args.lr_convention or settings.LR_CONVENTION,
            dedup=dedup,
            eof=_flag(getattr(args, "eof", None), settings.EOF),
            trace=_flag(getattr(args, "trace", None), settings.TRACE),
            max_firings=getattr(args, "max_firings", None) or settings.MAX_FIRINGS,
            **extra,
        )
    except ValidationError as e:
        raise InputValidationError(first_error(e)) from e


def read_tokens(path: Path) -> list[str]:
    """One token per line; blank lines are skipped."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputValidationError(f"cannot read tokens from {path}: {e}") from e
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_grammar(config: RunConfig) -> tuple[Grammar, Program]:
    try:
        text = config.grammar.read_text(encoding="utf-8")
    except OSError as e:
        raise InputValidationError(f"cannot read {config.grammar}: {e}") from e
    grammar = parse_grammar_source(text, source_name=str(config.grammar))
    program = compile_cfg(grammar, lr=config.lr, lr_convention=config.lr_convention, dedup=config.dedup)
    return grammar, program


def make_engine(program: Program, config: RunConfig) -> Engine:
    trace = TraceLogger(enabled=config.trace, stream=sys.stderr if config.trace else None)
    return Engine(program, trace=trace, max_firings=config.max_firings)


def require_tokens(config: RunConfig) -> None:
    if not config.tokens:
        raise InputValidationError("no input tokens given")


def first_error(e: ValidationError) -> str:
    errors = e.errors()
    return errors[0].get("msg", "Validation error") if errors else "Invalid configuration"


def _flag(value: bool | None, default: bool) -> bool:
    return default if value is None else value
