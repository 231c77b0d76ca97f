"""Command-line entry point.

Usage:
    python run.py compile chrg/grammars/expr_lr.chrg
    python run.py parse chrg/grammars/expr_lr.chrg 1 + 2 '*' 3
    python run.py solutions chrg/grammars/abduction.chr mary likes martha . she hates her .
    python run.py bench chrg/grammars/grammar_g.chrg lens=8..24 samples=5
"""
import sys

from chrg import main

if __name__ == "__main__":
    sys.exit(main())
