"""``parse``: run a grammar on a token string and print the final store.

The last line is ``ACCEPT`` when the start symbol spans the whole input,
``ROBUST-PARTIAL`` plus the recognized nonterminal spans otherwise, and
``FAIL`` (exit 3) when every branch failed.
"""
from __future__ import annotations

import argparse

import structlog

from chrg.commands.common import add_run_options, build_run_config, load_grammar, make_engine, require_tokens
from chrg.config import Settings
from chrg.models.responses import ParseReport, ParseStatus
from chrg.services.grammar_compiler import accepts, recognized_spans, tokenize
from chrg.syntax.printer import format_term
from chrg.utils.exceptions import EXIT_FAILED_DERIVATION, EXIT_OK

logger = structlog.get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("parse", help="parse tokens and print the final store")
    add_run_options(parser)
    parser.set_defaults(handler=cmd_parse)


def cmd_parse(args: argparse.Namespace, settings: Settings) -> int:
    config = build_run_config(args, settings)
    require_tokens(config)
    grammar, program = load_grammar(config)

    initial = tokenize(config.tokens, eof=config.eof or grammar.eof)
    engine = make_engine(program, config)
    result = engine.run(initial)

    if not result.success:
        report = ParseReport(status=ParseStatus.FAIL, firings=result.firings)
    else:
        terms = result.constraints
        start = grammar.start_symbol
        if start is not None and accepts(terms, start, len(config.tokens)):
            status, spans = ParseStatus.ACCEPT, []
        else:
            status = ParseStatus.ROBUST_PARTIAL
            spans = [format_term(t, var_style="serial") for t in recognized_spans(terms, grammar)]
        report = ParseReport(status=status, store=result.dump(), spans=spans, firings=result.firings)

    for line in report.lines():
        print(line)
    logger.info("parse_finished", status=report.status.value, firings=report.firings,
                constraints=len(report.store))
    return EXIT_FAILED_DERIVATION if report.status is ParseStatus.FAIL else EXIT_OK
