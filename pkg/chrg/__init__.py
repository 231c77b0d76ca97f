"""chrg: a Constraint Handling Rules engine and CHR Grammar toolkit.

The package compiles CHR Grammars (plain, context-sensitive and LR-mode
productions, assumption grammar operators, abducibles) into CHR programs
and runs them with backtracking. ``create_cli()`` builds the command line
and ``main()`` runs one invocation with configured logging.
"""
from __future__ import annotations

import argparse
import sys

import structlog
from pydantic import ValidationError

from chrg.config import Settings, get_settings
from chrg.utils.exceptions import InputValidationError
from chrg.utils.logger import setup_logging

__version__ = "0.1.0"


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as InputValidationError."""

    def error(self, message: str):
        raise InputValidationError(f"{self.prog}: {message}")

    def parse_args(self, args=None, namespace=None):
        """Words left over after interleaved options join the command's ``collect_extra`` list."""
        parsed, extras = self.parse_known_args(args, namespace)
        if not extras:
            return parsed
        dest = getattr(parsed, "collect_extra", None)
        options = [word for word in extras if word.startswith("-") and word != "-"]
        if dest is None or options:
            self.error(f"unrecognized arguments: {' '.join(options or extras)}")
        setattr(parsed, dest, [*(getattr(parsed, dest) or []), *extras])
        return parsed


def create_cli() -> CliParser:
    """Build the ``chrg`` parser with the compile, parse, solutions and bench commands."""
    parser = CliParser(prog="chrg", description="CHR Grammar compiler and CHR engine")
    parser.add_argument("--log-level", default=None, help="override CHRG_LOG_LEVEL")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    from chrg.commands import bench, compile, parse, solutions
    for command in (compile, parse, solutions, bench):
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run one command line invocation and return its exit code."""
    from chrg.commands.errors import report_error, run_command

    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"error: invalid configuration: {e.errors()[0].get('msg')}", file=sys.stderr)
        return 5

    try:
        args = create_cli().parse_args(argv)
    except InputValidationError as e:
        setup_logging(log_level=settings.LOG_LEVEL, log_format=settings.LOG_FORMAT)
        return report_error(e)

    log_level = args.log_level or settings.LOG_LEVEL
    setup_logging(log_level=log_level, log_format=settings.LOG_FORMAT)
    structlog.get_logger(__name__).debug("cli_started", command=args.command, log_level=log_level)
    return run_command(args.handler, args, settings)


__all__ = ["CliParser", "Settings", "create_cli", "main", "__version__"]
