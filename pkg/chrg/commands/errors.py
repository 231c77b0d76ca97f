"""Map toolkit exceptions to exit codes.

Every command handler runs through ``run_command``. A ChrgError prints
``error: <message>`` on stderr and returns the exit code the exception
carries; anything else is logged with its traceback and returns 1.

Usage:
    from chrg.commands.errors import run_command
    code = run_command(args.handler, args, settings)
"""
from __future__ import annotations

import sys
from typing import Callable

import structlog

from chrg.utils.exceptions import ChrgError

logger = structlog.get_logger(__name__)


def report_error(e: ChrgError) -> int:
    logger.warning(
        "chrg_error",
        error=e.message,
        error_type=type(e).__name__,
        exit_code=e.exit_code,
    )
    print(f"error: {e.message}", file=sys.stderr)
    return e.exit_code


def run_command(handler: Callable[..., int], *args, **kwargs) -> int:
    try:
        return handler(*args, **kwargs)
    except ChrgError as e:
        return report_error(e)
    except Exception as e:
        logger.error(
            "unexpected_error",
            error=str(e),
            error_type=type(e).__name__,
            exc_info=True,
        )
        print(f"error: unexpected {type(e).__name__}: {e}", file=sys.stderr)
        return 1
