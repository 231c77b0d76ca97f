"""Hypothetical reasoning on top of the engine.

Assumption grammar operators are ordinary constraints:

    +(P,Args,N)   linear assertion at position N (consumed once)
    *(P,Args,N)   intuitionistic assertion (reusable)
    -(P,Args,N)   expectation at position N
    =+(P,Args)  =*(P,Args)  =-(P,Args)   the same without positions

The prelude pairs expectations with earlier assertions. Its rules are
choice rules: when an expectation is consumed, the remaining candidate
assertions are tried on backtracking, in ascending id order.

Abduction adds idempotence rules for abducible predicates and
``not p(...), p(...) <=> fail`` rules for explicit negation; integrity
constraints are plain rules with a ``fail`` body.
"""
from __future__ import annotations

from dataclasses import replace
from functools import lru_cache
from importlib import resources
from typing import Iterable

from chrg.models.rules import FAIL, Rule
from chrg.models.terms import Compound, Int, Term, struct
from chrg.services.store import Store
from chrg.services.unification import SERIALS, SerialCounter
from chrg.syntax.reader import parse_rules

# Assertions must be ground whatever the program allows.
ASSERTION_KEYS: frozenset[tuple[str, int]] = frozenset({("+", 3), ("*", 3), ("=+", 2), ("=*", 2)})
LINEAR_KEYS: tuple[tuple[str, int], ...] = (("+", 3), ("=+", 2))

_PRELUDE = r"""
timeless_linear @ =+(P,A), =-(P,B) <=> true & A=B | true.
timeless_intuitionistic @ =*(P,A) \ =-(P,B) <=> true & A=B | true.
timed_linear @ +(P,A,Z1), -(P,B,Z2) <=> Z1 < Z2 & A=B | true.
timed_intuitionistic @ *(P,A,Z1) \ -(P,B,Z2) <=> Z1 < Z2 & A=B | true.
"""

DEMO_PACKAGE = "chrg.grammars"


@lru_cache(maxsize=1)
def assumption_prelude() -> tuple[Rule, ...]:
    """The four rules pairing expectations with assertions."""
    return tuple(replace(rule, choice=True) for rule in parse_rules(_PRELUDE))


def all_consumed(store: Store) -> bool:
    """True when no linear assertion (``+/3`` or ``=+/2``) is left in the store."""
    return not any(store.ids(functor, arity) for functor, arity in LINEAR_KEYS)


def abducible_rules(pred: str, arity: int, counter: SerialCounter = SERIALS) -> list[Rule]:
    """``p(X1..Xn)#Id0 \\ p(X1..Xn) <=> true``: one live copy per hypothesis."""
    head = struct(pred, *(counter.fresh(f"X{i}") for i in range(1, arity + 1)))
    return [Rule(
        name=f"abducible_{pred}_{arity}",
        kept_heads=(head,),
        removed_heads=(head,),
        passive=frozenset({0}),
    )]


def negation_rules(pred: str, arity: int, counter: SerialCounter = SERIALS) -> list[Rule]:
    """``not p(X1..Xn), p(X1..Xn) <=> fail``."""
    head = struct(pred, *(counter.fresh(f"X{i}") for i in range(1, arity + 1)))
    return [Rule(
        name=f"negation_{pred}_{arity}",
        removed_heads=(Compound("not", (head,)), head),
        body=FAIL,
    )]


# ── Reading results ───────────────────────────────────────────────────

def facts(terms: Iterable[Term], name: str = "fact") -> list[Term]:
    """Constraints named ``name`` among ``terms``, in the order given."""
    return [t for t in terms if isinstance(t, Compound) and t.functor == name]


def semantic_term(terms: Iterable[Term], name: str = "text") -> Term | None:
    """Meaning carried by the widest ``name(Meaning, From, To)`` constraint."""
    best: Compound | None = None
    for t in terms:
        if isinstance(t, Compound) and t.functor == name and len(t.args) == 3:
            if best is None or _width(t) > _width(best):
                best = t
    return best.args[0] if best is not None else None


def _width(t: Compound) -> int:
    start, end = t.args[1], t.args[2]
    if isinstance(start, Int) and isinstance(end, Int):
        return end.value - start.value
    return -1


# ── Demo sources ──────────────────────────────────────────────────────

def demo_grammars() -> dict[str, str]:
    """Bundled demo sources by file name."""
    root = resources.files(DEMO_PACKAGE)
    return {
        entry.name: entry.read_text(encoding="utf-8")
        for entry in sorted(root.iterdir(), key=lambda e: e.name)
        if entry.name.endswith((".chrg", ".chr"))
    }


def load_demo(name: str) -> str:
    """Source text of one bundled demo, e.g. ``load_demo("expr_lr.chrg")``."""
    sources = demo_grammars()
    if name not in sources:
        raise KeyError(f"no demo grammar '{name}' (available: {', '.join(sources)})")
    return sources[name]
