"""``bench``: time a grammar on random strings and fit the growth exponent.

    bench grammar_g.chrg lens=8..24 samples=5 alphabet=a,b reps=3 workers=2 seed=1
"""
from __future__ import annotations

import argparse

from pydantic import ValidationError

from chrg.commands.common import first_error
from chrg.config import Settings
from chrg.models.requests import BenchConfig
from chrg.services.benchmark import run_benchmark
from chrg.utils.exceptions import EXIT_OK, InputValidationError

_SWITCH = {"on": True, "off": False}


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="time a grammar on random token strings")
    parser.add_argument("grammar", help="grammar source")
    parser.add_argument("params", nargs="*", metavar="key=value",
                        help="lens=8..24[:step] samples=K alphabet=a,b reps=R workers=W seed=S")
    parser.add_argument("--dedup", choices=tuple(_SWITCH), default=None,
                        help="force idempotence rules on or off")
    parser.set_defaults(handler=cmd_bench, collect_extra="params")


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    dedup = _SWITCH[args.dedup] if args.dedup is not None else settings.DEDUP
    try:
        config = BenchConfig.from_words(
            args.grammar,
            args.params,
            repetitions=settings.BENCH_REPETITIONS,
            workers=settings.BENCH_WORKERS,
            seed=settings.BENCH_SEED,
            dedup=dedup,
        )
    except ValidationError as e:
        raise InputValidationError(first_error(e)) from e
    except ValueError as e:
        raise InputValidationError(str(e)) from e

    for line in run_benchmark(config).lines():
        print(line)
    return EXIT_OK
