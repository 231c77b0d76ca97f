"""Tests for run and benchmark configuration models."""
from __future__ import annotations

import pytest
from pydantic import ValidationError

from chrg.models.requests import BenchConfig, RunConfig, lex_token, parse_lengths
from chrg.models.responses import BenchReport, BenchRow, ParseReport, ParseStatus


@pytest.fixture
def grammar_file(tmp_path):
    path = tmp_path / "g.chrg"
    path.write_text("[a] --> as.\n", encoding="utf-8")
    return path


class TestLexToken:
    def test_digits_become_int(self):
        assert lex_token("42") == 42

    def test_symbols_stay_text(self):
        assert lex_token("+") == "+"
        assert lex_token("-3") == "-3"
        assert lex_token("a1") == "a1"


class TestRunConfig:
    def test_defaults(self, grammar_file):
        config = RunConfig(grammar=grammar_file)
        assert config.tokens == []
        assert config.lr is None
        assert config.lr_convention == "rightmost"
        assert config.solutions == 10

    def test_tokens_lexed(self, grammar_file):
        config = RunConfig(grammar=grammar_file, tokens=["1", "+", "2"])
        assert config.tokens == [1, "+", 2]

    def test_missing_grammar(self, tmp_path):
        with pytest.raises(ValidationError, match="grammar file not found"):
            RunConfig(grammar=tmp_path / "nope.chrg")

    def test_convention_normalized(self, grammar_file):
        assert RunConfig(grammar=grammar_file, lr_convention=" Leftmost ").lr_convention == "leftmost"

    def test_bad_convention(self, grammar_file):
        with pytest.raises(ValidationError):
            RunConfig(grammar=grammar_file, lr_convention="middle")

    def test_solutions_at_least_one(self, grammar_file):
        with pytest.raises(ValidationError):
            RunConfig(grammar=grammar_file, solutions=0)


class TestBenchConfig:
    def test_defaults(self, grammar_file):
        config = BenchConfig(grammar=grammar_file)
        assert config.lengths == [8, 10, 12, 14, 16, 18, 20, 22, 24]
        assert config.alphabet == ["a", "b"]
        assert config.repetitions == 3

    def test_lengths_strictly_increasing(self, grammar_file):
        with pytest.raises(ValidationError, match="strictly increasing"):
            BenchConfig(grammar=grammar_file, lengths=[8, 8, 10])

    def test_lengths_positive(self, grammar_file):
        with pytest.raises(ValidationError, match="positive"):
            BenchConfig(grammar=grammar_file, lengths=[0, 4])

    def test_two_lengths_needed(self, grammar_file):
        with pytest.raises(ValidationError, match="at least two lengths"):
            BenchConfig(grammar=grammar_file, lengths=[8])

    def test_repetitions_at_least_three(self, grammar_file):
        with pytest.raises(ValidationError):
            BenchConfig(grammar=grammar_file, repetitions=2)

    def test_empty_alphabet(self, grammar_file):
        with pytest.raises(ValidationError, match="alphabet cannot be empty"):
            BenchConfig(grammar=grammar_file, alphabet=[" ", ""])

    def test_from_words(self, grammar_file):
        config = BenchConfig.from_words(
            grammar_file,
            ["lens=8..16:4", "samples=2", "alphabet=a,b,c", "reps=5", "workers=2", "seed=9"],
        )
        assert config.lengths == [8, 12, 16]
        assert config.samples == 2
        assert config.alphabet == ["a", "b", "c"]
        assert config.repetitions == 5
        assert config.workers == 2
        assert config.seed == 9

    def test_from_words_keeps_defaults(self, grammar_file):
        config = BenchConfig.from_words(grammar_file, ["lens=4,6"], seed=3, workers=4)
        assert config.lengths == [4, 6]
        assert config.seed == 3
        assert config.workers == 4

    def test_from_words_unknown_key(self, grammar_file):
        with pytest.raises(ValueError, match="unknown benchmark parameter"):
            BenchConfig.from_words(grammar_file, ["speed=fast"])

    def test_from_words_needs_equals(self, grammar_file):
        with pytest.raises(ValueError, match="expected key=value"):
            BenchConfig.from_words(grammar_file, ["lens"])


class TestParseLengths:
    def test_range_default_step(self):
        assert parse_lengths("8..14") == [8, 10, 12, 14]

    def test_range_with_step(self):
        assert parse_lengths("10..30:10") == [10, 20, 30]

    def test_comma_list(self):
        assert parse_lengths("5,7,9") == [5, 7, 9]

    def test_garbage(self):
        with pytest.raises(ValueError, match="cannot read lengths"):
            parse_lengths("eight")

    def test_zero_step(self):
        with pytest.raises(ValueError, match="step must be positive"):
            parse_lengths("8..24:0")


class TestReports:
    def test_accept_lines(self):
        report = ParseReport(status=ParseStatus.ACCEPT, store=["np(0,1)"])
        assert report.lines() == ["np(0,1)", "ACCEPT"]

    def test_partial_lists_spans(self):
        report = ParseReport(status=ParseStatus.ROBUST_PARTIAL, store=["np(0,1)"], spans=["np(0,1)"])
        assert report.lines()[-1] == "ROBUST-PARTIAL np(0,1)"

    def test_fail_prints_only_fail(self):
        report = ParseReport(status=ParseStatus.FAIL, store=["ignored"])
        assert report.lines() == ["FAIL"]

    def test_bench_lines(self):
        report = BenchReport(rows=[BenchRow(n=8, mean_store=40.0, median_time_ms=1.25)], slope=2.9876)
        lines = report.lines()
        assert lines[0].split() == ["n", "mean_store", "median_time_ms"]
        assert lines[1].split() == ["8", "40.0", "1.250"]
        assert lines[-1] == "slope 2.988"
