"""Reading and printing terms, rules and grammar sources."""
