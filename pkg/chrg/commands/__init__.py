"""Command-line commands: compile, parse, solutions, bench."""
