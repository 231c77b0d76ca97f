"""Tests for the complexity benchmark."""
from __future__ import annotations

import pytest
from structlog.testing import capture_logs

from chrg.models.requests import BenchConfig
from chrg.services.benchmark import fit_slope, measure, random_strings, run_benchmark
from chrg.services.grammar_compiler import compile_source


class TestFitSlope:
    def test_cubic(self):
        lengths = [4, 8, 16, 32, 64, 128]
        slope, fitted = fit_slope(lengths, [n ** 3 * 1e-6 for n in lengths])
        assert slope == pytest.approx(3.0)
        assert fitted == [32, 64, 128]

    def test_two_lengths_use_both(self):
        slope, fitted = fit_slope([10, 20], [1.0, 4.0])
        assert fitted == [10, 20]
        assert slope == pytest.approx(2.0)


class TestRandomStrings:
    def test_deterministic(self):
        assert random_strings([3, 5], 2, ["a", "b"], seed=7) == random_strings([3, 5], 2, ["a", "b"], seed=7)

    def test_shape(self):
        strings = random_strings([3, 5], 2, ["a", "b"], seed=1)
        assert [len(s) for s in strings] == [3, 3, 5, 5]
        assert {t for s in strings for t in s} <= {"a", "b"}


class TestMeasure:
    def test_store_size(self, demo_path):
        _, program = compile_source(demo_path("as.chrg").read_text(encoding="utf-8"))
        m = measure(program, ["a"] * 4, repetitions=3)
        assert m.n == 4
        assert m.store_size == 14
        assert m.seconds >= 0


class TestRunBenchmark:
    def test_as_grammar(self, demo_path):
        config = BenchConfig(grammar=demo_path("as.chrg"), lengths=[2, 4], samples=2, alphabet=["a"])
        with capture_logs() as logs:
            report = run_benchmark(config)
        assert [row.n for row in report.rows] == [2, 4]
        assert [row.mean_store for row in report.rows] == [5.0, 14.0]
        assert report.fitted_lengths == [2, 4]
        events = [e["event"] for e in logs if e["event"].startswith("benchmark_")]
        assert events == ["benchmark_started", "benchmark_finished"]

    def test_workers_give_same_stores(self, demo_path):
        common = dict(grammar=demo_path("grammar_g.chrg"), lengths=[3, 6], samples=3, seed=4)
        serial = run_benchmark(BenchConfig(**common))
        threaded = run_benchmark(BenchConfig(workers=3, **common))
        assert [r.mean_store for r in serial.rows] == [r.mean_store for r in threaded.rows]
