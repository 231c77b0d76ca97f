"""Tests for terms, rules, grammar values and run configuration."""
