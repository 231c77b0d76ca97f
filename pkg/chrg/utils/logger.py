"""Structured logging configuration using structlog.

Command output goes to stdout; every log line goes to stderr, the
diagnostics stream, so that store dumps stay machine-readable.

Usage:
    from chrg.utils.logger import setup_logging

    setup_logging(log_level="INFO", log_format="console")

    import structlog
    logger = structlog.get_logger(__name__)
    logger.info("event_name", key="value")
"""
from __future__ import annotations

import logging
import sys

import structlog


def setup_logging(log_level: str = "INFO", log_format: str = "console") -> None:
    """Configure structlog for the whole toolkit.

    Safe to call more than once; the last call wins and binds the current
    ``sys.stderr``.

    Args:
        log_level: Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL.
        log_format: Output format: 'json' for pipelines, 'console' for humans.
    """
    shared_processors: list[structlog.types.Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    stream = sys.stderr
    if log_format == "json":
        renderer: structlog.types.Processor = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=stream.isatty())

    level = getattr(logging, log_level.upper(), logging.INFO)
    structlog.configure(
        processors=[*shared_processors, renderer],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=stream),
        # stderr is rebound per invocation (tests swap it), so no caching
        cache_logger_on_first_use=False,
    )

    logging.basicConfig(format="%(message)s", level=level, stream=stream)
