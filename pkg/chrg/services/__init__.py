"""Engine, store, builtins, grammar compilation and hypotheses."""
