"""Goals, rules and programs.

A rule's heads are numbered kept heads first, then removed heads; that
numbering is what ``passive`` and firing records refer to.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Union

from chrg.models.terms import Compound, Const, Term, Var, functor_key, term_args, term_vars

# Builtins the engine evaluates; any other callable goal is a constraint.
BUILTIN_KEYS: frozenset[tuple[str, int]] = frozenset({
    ("=", 2), ("\\=", 2), ("==", 2), ("\\==", 2),
    ("<", 2), (">", 2), ("=<", 2), (">=", 2),
    ("member", 2), ("integer", 1),
    ("find_constraint", 2), ("all_consumed", 0),
    ("\\+", 1),
})


# ── Goals ─────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class TrueGoal:
    pass


@dataclass(frozen=True, slots=True)
class FailGoal:
    pass


@dataclass(frozen=True, slots=True)
class Call:
    """Insert a constraint and activate it."""

    functor: str
    args: tuple = ()

    @property
    def key(self) -> tuple[str, int]:
        return self.functor, len(self.args)


@dataclass(frozen=True, slots=True)
class Builtin:
    name: str
    args: tuple = ()

    @property
    def key(self) -> tuple[str, int]:
        return self.name, len(self.args)


@dataclass(frozen=True, slots=True)
class And:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True, slots=True)
class IfThenElse:
    cond: "Goal"
    then: "Goal"
    orelse: "Goal"


Goal = Union[TrueGoal, FailGoal, Call, Builtin, And, Or, IfThenElse]

TRUE = TrueGoal()
FAIL = FailGoal()


def conjunction(goals: list[Goal]) -> Goal:
    """Right-nested conjunction of ``goals``; ``true`` when empty."""
    goals = [g for g in goals if not isinstance(g, TrueGoal)]
    if not goals:
        return TRUE
    result = goals[-1]
    for g in reversed(goals[:-1]):
        result = And(g, result)
    return result


def conjuncts(goal: Goal) -> list[Goal]:
    if isinstance(goal, And):
        return conjuncts(goal.left) + conjuncts(goal.right)
    if isinstance(goal, TrueGoal):
        return []
    return [goal]


def term_to_goal(term: Term) -> Goal:
    """Classify a term read from source text as a goal."""
    if isinstance(term, Var):
        raise ValueError(f"variable '{term.name}' used as a goal")
    if not isinstance(term, (Compound, Const)):
        raise ValueError(f"{term!r} is not callable")
    name, arity = functor_key(term)
    args = term_args(term)
    if (name, arity) == ("true", 0):
        return TRUE
    if (name, arity) == ("fail", 0):
        return FAIL
    if (name, arity) == (",", 2):
        return And(term_to_goal(args[0]), term_to_goal(args[1]))
    if (name, arity) == (";", 2):
        left = args[0]
        if isinstance(left, Compound) and left.functor == "->" and len(left.args) == 2:
            return IfThenElse(term_to_goal(left.args[0]), term_to_goal(left.args[1]),
                              term_to_goal(args[1]))
        return Or(term_to_goal(left), term_to_goal(args[1]))
    if (name, arity) == ("->", 2):
        return IfThenElse(term_to_goal(args[0]), term_to_goal(args[1]), FAIL)
    if (name, arity) in BUILTIN_KEYS:
        return Builtin(name, args)
    return Call(name, args)


def map_goal(goal: Goal, fn: Callable[[Term], Term]) -> Goal:
    """Apply ``fn`` to every argument term inside ``goal``."""
    if isinstance(goal, Call):
        return Call(goal.functor, tuple(fn(a) for a in goal.args))
    if isinstance(goal, Builtin):
        return Builtin(goal.name, tuple(fn(a) for a in goal.args))
    if isinstance(goal, And):
        return And(map_goal(goal.left, fn), map_goal(goal.right, fn))
    if isinstance(goal, Or):
        return Or(map_goal(goal.left, fn), map_goal(goal.right, fn))
    if isinstance(goal, IfThenElse):
        return IfThenElse(map_goal(goal.cond, fn), map_goal(goal.then, fn),
                          map_goal(goal.orelse, fn))
    return goal


def goal_terms(goal: Goal) -> Iterator[Term]:
    if isinstance(goal, (Call, Builtin)):
        yield from goal.args
    elif isinstance(goal, (And, Or)):
        yield from goal_terms(goal.left)
        yield from goal_terms(goal.right)
    elif isinstance(goal, IfThenElse):
        yield from goal_terms(goal.cond)
        yield from goal_terms(goal.then)
        yield from goal_terms(goal.orelse)


def goal_calls(goal: Goal) -> Iterator[Call]:
    if isinstance(goal, Call):
        yield goal
    elif isinstance(goal, (And, Or)):
        yield from goal_calls(goal.left)
        yield from goal_calls(goal.right)
    elif isinstance(goal, IfThenElse):
        yield from goal_calls(goal.cond)
        yield from goal_calls(goal.then)
        yield from goal_calls(goal.orelse)


# ── Rules ─────────────────────────────────────────────────────────────

class RuleKind(str, Enum):
    PROPAGATION = "propagation"
    SIMPLIFICATION = "simplification"
    SIMPAGATION = "simpagation"


@dataclass(frozen=True)
class Rule:
    """One CHR rule.

    Args:
        name: Identifier used in traces and history records.
        kept_heads: Heads that stay in the store when the rule fires.
        removed_heads: Heads that are killed when the rule fires.
        passive: Head positions that never act as the active constraint.
        guard_ask: Builtin goals that must hold without binding anything.
        guard_tell: ``=`` goals executed once the ask part succeeded.
        body: Goal run after the rule fires.
        choice: Leave a choice point over alternative partners when the
            active constraint is removed by this rule.
    """

    name: str
    kept_heads: tuple = ()
    removed_heads: tuple = ()
    passive: frozenset = frozenset()
    guard_ask: tuple = ()
    guard_tell: tuple = ()
    body: Goal = TRUE
    choice: bool = False

    def __post_init__(self) -> None:
        if not self.kept_heads and not self.removed_heads:
            raise ValueError(f"rule '{self.name}' has no heads")
        n = len(self.kept_heads) + len(self.removed_heads)
        bad = [p for p in self.passive if not 0 <= p < n]
        if bad:
            raise ValueError(f"rule '{self.name}': passive positions {bad} out of range")
        for head in self.heads:
            if not isinstance(head, (Compound, Const)):
                raise ValueError(f"rule '{self.name}': head {head!r} is not callable")

    @property
    def heads(self) -> tuple:
        return self.kept_heads + self.removed_heads

    @property
    def kind(self) -> RuleKind:
        if not self.removed_heads:
            return RuleKind.PROPAGATION
        if not self.kept_heads:
            return RuleKind.SIMPLIFICATION
        return RuleKind.SIMPAGATION

    def is_removed(self, position: int) -> bool:
        return position >= len(self.kept_heads)

    def variables(self) -> list[Var]:
        terms: list[Term] = list(self.heads)
        for g in (*self.guard_ask, *self.guard_tell, self.body):
            terms.extend(goal_terms(g))
        return term_vars(*terms)


# ── Programs ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Program:
    """An ordered rule list plus the per-constraint occurrence table.

    ``occurrences[(name, arity)]`` lists ``(rule_index, head_position)``
    for every non-passive head, in rule order then head order.
    ``allows_open`` is true when some body call may insert a constraint
    with a variable not bound by the heads or the tell guard.
    """

    rules: tuple
    ground_keys: frozenset = frozenset()
    occurrences: dict = field(init=False, repr=False, compare=False)
    allows_open: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        occurrences: dict[tuple[str, int], list[tuple[int, int]]] = {}
        allows_open = False
        for index, rule in enumerate(self.rules):
            for position, head in enumerate(rule.heads):
                if position in rule.passive:
                    continue
                occurrences.setdefault(functor_key(head), []).append((index, position))

            bound = {v.serial for v in term_vars(*rule.heads)}
            for g in rule.guard_tell:
                bound.update(v.serial for v in term_vars(*goal_terms(g)))
            for call in goal_calls(rule.body):
                if any(v.serial not in bound for v in term_vars(*call.args)):
                    allows_open = True

        object.__setattr__(self, "occurrences", {k: tuple(v) for k, v in occurrences.items()})
        object.__setattr__(self, "allows_open", allows_open)

    def occurrences_of(self, key: tuple[str, int]) -> tuple:
        return self.occurrences.get(key, ())

    def __len__(self) -> int:
        return len(self.rules)
