"""Complexity benchmark over random token strings.

For every length n, ``samples`` random strings over the alphabet are
parsed ``repetitions`` times each with a fresh engine. A row reports the
mean final store size and the median wall time; the slope of
log(time) against log(n) over the larger half of the lengths estimates
the polynomial degree.

Samples are independent, so they may run on a thread pool (one engine
per task); rows and the fit are computed afterwards on the caller's
thread.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import structlog

from chrg.models.requests import BenchConfig
from chrg.models.responses import BenchReport, BenchRow
from chrg.models.rules import Program
from chrg.services.engine import Engine
from chrg.services.grammar_compiler import compile_cfg, tokenize
from chrg.syntax.reader import parse_grammar_source

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Measurement:
    n: int
    store_size: int
    seconds: float


def random_strings(lengths: list[int], samples: int, alphabet: list[str], seed: int) -> list[list[str]]:
    rng = random.Random(seed)
    return [[rng.choice(alphabet) for _ in range(n)] for n in lengths for _ in range(samples)]


def measure(program: Program, tokens: list, repetitions: int, eof: bool = False) -> Measurement:
    """Median wall time of ``repetitions`` runs and the final store size."""
    initial = tokenize(tokens, eof=eof)
    times: list[float] = []
    size = 0
    for _ in range(repetitions):
        engine = Engine(program)
        start = time.perf_counter()
        engine.run(initial)
        times.append(time.perf_counter() - start)
        size = len(engine.store)
    return Measurement(n=len(tokens), store_size=size, seconds=float(np.median(times)))


def fit_slope(lengths: list[int], seconds: list[float]) -> tuple[float, list[int]]:
    """Least-squares slope of log(seconds) on log(n) over the larger half of the lengths."""
    half = len(lengths) // 2
    if len(lengths) - half < 2:
        half = max(0, len(lengths) - 2)
    xs = np.log(np.asarray(lengths[half:], dtype=float))
    ys = np.log(np.maximum(np.asarray(seconds[half:], dtype=float), 1e-9))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope), list(lengths[half:])


def run_benchmark(config: BenchConfig, program: Program | None = None) -> BenchReport:
    """Benchmark ``config.grammar`` (or an already compiled ``program``)."""
    eof = False
    if program is None:
        grammar = parse_grammar_source(config.grammar.read_text(encoding="utf-8"),
                                       source_name=str(config.grammar))
        program = compile_cfg(grammar, dedup=config.dedup)
        eof = grammar.eof

    strings = random_strings(config.lengths, config.samples, config.alphabet, config.seed)
    logger.info(
        "benchmark_started",
        grammar=str(config.grammar),
        lengths=config.lengths,
        samples=config.samples,
        workers=config.workers,
    )

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(lambda s: measure(program, s, config.repetitions, eof), strings))

    rows: list[BenchRow] = []
    for n in config.lengths:
        group = [m for m in results if m.n == n]
        rows.append(BenchRow(
            n=n,
            mean_store=float(np.mean([m.store_size for m in group])),
            median_time_ms=float(np.median([m.seconds for m in group])) * 1000.0,
        ))

    slope, fitted = fit_slope([r.n for r in rows], [r.median_time_ms / 1000.0 for r in rows])
    logger.info("benchmark_finished", slope=round(slope, 3), rows=len(rows))
    return BenchReport(rows=rows, slope=slope, fitted_lengths=fitted)
