"""Grammar values produced by the reader and consumed by the compiler.

In a production ``exp, [+], exp /- [eof] <-> exp`` the reduced side
(``rhs``) is everything left of the arrow and ``lhs`` is the nonterminal
it reduces to.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

from chrg.models.rules import Rule
from chrg.models.terms import Term


@dataclass(frozen=True)
class Terminal:
    value: Term


@dataclass(frozen=True)
class Nonterminal:
    name: str
    attrs: tuple = ()


@dataclass(frozen=True)
class Code:
    """A ``{Goal}`` item; the goal is kept as a term until compilation."""

    goal: Term


@dataclass(frozen=True)
class LeftContext:
    items: tuple


@dataclass(frozen=True)
class RightContext:
    alternatives: tuple


GrammarSymbol = Union[Terminal, Nonterminal]
Item = Union[Terminal, Nonterminal, Code]


class ProductionKind(str, Enum):
    PROPAGATION = "-->"
    SIMPLIFICATION = "<->"


@dataclass(frozen=True)
class Production:
    """A grammar rule.

    Args:
        lhs: First nonterminal on the result side.
        rhs: Reduced items, optionally preceded by a LeftContext and/or
            followed by a RightContext.
        kind: Propagation keeps the reduced constraints, simplification
            consumes them.
        lr_mode: Set by the ``ruleLR`` prefix.
        result: All result-side items in order (``lhs`` is one of them).
        line: Source line, for messages.
    """

    lhs: Nonterminal
    rhs: tuple
    kind: ProductionKind = ProductionKind.PROPAGATION
    lr_mode: bool = False
    result: tuple = ()
    line: int | None = None

    @property
    def core(self) -> tuple:
        return tuple(i for i in self.rhs if not isinstance(i, (LeftContext, RightContext)))

    @property
    def left_context(self) -> LeftContext | None:
        return next((i for i in self.rhs if isinstance(i, LeftContext)), None)

    @property
    def right_context(self) -> RightContext | None:
        return next((i for i in self.rhs if isinstance(i, RightContext)), None)

    @property
    def result_items(self) -> tuple:
        return self.result or (self.lhs,)


@dataclass(frozen=True)
class Grammar:
    """A grammar source: productions and raw rules in source order, plus directives."""

    clauses: tuple = ()
    start: str | None = None
    global_lr: bool = False
    dedup: bool | None = None
    eof: bool = False
    prelude: bool = False
    abducibles: tuple = ()
    negations: tuple = ()

    @property
    def productions(self) -> list[Production]:
        return [c for c in self.clauses if isinstance(c, Production)]

    @property
    def raw_rules(self) -> list[Rule]:
        return [c for c in self.clauses if isinstance(c, Rule)]

    @property
    def start_symbol(self) -> str | None:
        if self.start is not None:
            return self.start
        productions = self.productions
        return productions[0].lhs.name if productions else None

    def nonterminals(self) -> list[tuple[str, int]]:
        """Distinct (name, constraint arity) of every nonterminal, first use first."""
        seen: dict[tuple[str, int], None] = {}

        def visit(items: tuple) -> None:
            for item in items:
                if isinstance(item, Nonterminal):
                    seen.setdefault((item.name, len(item.attrs) + 2), None)
                elif isinstance(item, LeftContext):
                    visit(item.items)
                elif isinstance(item, RightContext):
                    for alt in item.alternatives:
                        visit(alt)

        for p in self.productions:
            visit(p.result_items)
            visit(p.rhs)
        return list(seen)
