"""``solutions``: enumerate distinct final stores in backtracking order."""
from __future__ import annotations

import argparse

import structlog

from chrg.commands.common import add_run_options, build_run_config, load_grammar, make_engine, require_tokens
from chrg.config import Settings
from chrg.services.grammar_compiler import tokenize
from chrg.utils.exceptions import EXIT_FAILED_DERIVATION, EXIT_OK

logger = structlog.get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solutions", help="enumerate final stores on backtracking")
    add_run_options(parser)
    parser.add_argument("--limit", "--solutions", dest="limit", type=int, default=None,
                        help="stop after this many distinct stores")
    parser.set_defaults(handler=cmd_solutions)


def cmd_solutions(args: argparse.Namespace, settings: Settings) -> int:
    config = build_run_config(args, settings, solutions=args.limit or settings.MAX_SOLUTIONS)
    require_tokens(config)
    grammar, program = load_grammar(config)

    initial = tokenize(config.tokens, eof=config.eof or grammar.eof)
    engine = make_engine(program, config)

    seen: set[tuple] = set()
    for solution in engine.solutions(initial):
        if solution.lines in seen:
            continue
        seen.add(solution.lines)
        print(f"solution {len(seen)}")
        for line in solution.lines:
            print(f"  {line}")
        if len(seen) >= config.solutions:
            break

    logger.info("solutions_finished", solutions=len(seen), firings=engine.firings)
    if not seen:
        print("FAIL")
        return EXIT_FAILED_DERIVATION
    return EXIT_OK
