"""First-order terms.

Variables compare by serial number only; the name is kept for printing.
Lists are cons cells ``'.'(Head, Tail)`` ending in the atom ``[]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str = field(compare=False)
    serial: int


@dataclass(frozen=True, slots=True)
class Const:
    name: str


@dataclass(frozen=True, slots=True)
class Int:
    value: int


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError(f"compound '{self.functor}' needs at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Union[Var, Const, Int, Compound]

NIL = Const("[]")
CONS = "."


# ── Construction ──────────────────────────────────────────────────────

def atom(name: str) -> Const:
    return Const(name)


def struct(functor: str, *args: Term) -> Term:
    """Build ``functor(args...)``, or the atom ``functor`` when no args are given."""
    return Compound(functor, tuple(args)) if args else Const(functor)


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = Compound(CONS, (item, result))
    return result


def from_python(value: object) -> Term:
    """Convert a token value (str / int / Term) to a term."""
    if isinstance(value, (Var, Const, Int, Compound)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not tokens")
    if isinstance(value, int):
        return Int(value)
    if isinstance(value, str):
        return Const(value)
    raise TypeError(f"cannot convert {value!r} to a term")


# ── Inspection ────────────────────────────────────────────────────────

def functor_key(term: Term) -> tuple[str, int]:
    """Return (name, arity) for a callable term."""
    if isinstance(term, Compound):
        return term.functor, len(term.args)
    if isinstance(term, Const):
        return term.name, 0
    raise TypeError(f"{term!r} is not callable")


def term_args(term: Term) -> tuple:
    return term.args if isinstance(term, Compound) else ()


def is_list_cell(term: Term) -> bool:
    return isinstance(term, Compound) and term.functor == CONS and len(term.args) == 2


def list_items(term: Term) -> list[Term] | None:
    """Return the elements of a proper list, or None if ``term`` is not one."""
    items: list[Term] = []
    while is_list_cell(term):
        items.append(term.args[0])
        term = term.args[1]
    return items if term == NIL else None


def iter_vars(term: Term) -> Iterator[Var]:
    """Yield variables depth-first, left to right (with repeats)."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))


def term_vars(*terms: Term) -> list[Var]:
    """Distinct variables of ``terms`` in first-occurrence order."""
    seen: dict[int, Var] = {}
    for term in terms:
        for v in iter_vars(term):
            seen.setdefault(v.serial, v)
    return list(seen.values())


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, Compound):
        return all(is_ground(a) for a in term.args)
    return True
