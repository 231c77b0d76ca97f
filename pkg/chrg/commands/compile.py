"""``compile``: print the compiled program, one rule per line."""
from __future__ import annotations

import argparse

import structlog

from chrg.commands.common import add_grammar_options, build_run_config, load_grammar
from chrg.config import Settings
from chrg.syntax.printer import format_program
from chrg.utils.exceptions import EXIT_OK

logger = structlog.get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("compile", help="print the CHR program a grammar compiles to")
    add_grammar_options(parser)
    parser.set_defaults(handler=cmd_compile)


def cmd_compile(args: argparse.Namespace, settings: Settings) -> int:
    config = build_run_config(args, settings)
    grammar, program = load_grammar(config)
    for line in format_program(program):
        print(line)
    logger.info("compile_finished", grammar=str(config.grammar), rules=len(program.rules))
    return EXIT_OK
