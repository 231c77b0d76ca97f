"""Tests for the service layer (engine, store, compiler, hypotheses)."""
