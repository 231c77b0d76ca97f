"""Bundled demo grammar sources."""
