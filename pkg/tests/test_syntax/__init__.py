"""Tests for the reader and printer."""
