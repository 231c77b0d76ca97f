"""Terms, rules, grammars and the pydantic command models."""
