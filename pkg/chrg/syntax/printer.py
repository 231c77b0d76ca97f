"""Operator-aware printing of terms, goals, rules, programs and stores.

The operator table is shared with the reader so that printed text reads
back to the same term.
"""
from __future__ import annotations

import re
from typing import TYPE_CHECKING

from chrg.models.rules import (
    And,
    Builtin,
    Call,
    FailGoal,
    Goal,
    IfThenElse,
    Or,
    Program,
    Rule,
    TrueGoal,
)
from chrg.models.terms import CONS, NIL, Compound, Const, Int, Term, Var, struct

if TYPE_CHECKING:
    from chrg.services.store import Store

# name -> (priority, type)
INFIX_OPS: dict[str, tuple[int, str]] = {
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"), "\\=": (700, "xfx"), "==": (700, "xfx"), "\\==": (700, "xfx"),
    "<": (700, "xfx"), ">": (700, "xfx"), "=<": (700, "xfx"), ">=": (700, "xfx"),
    "+": (500, "yfx"),
    "*": (400, "yfx"), "/": (400, "yfx"),
    "-": (300, "yfx"),
    "^": (200, "xfy"),
}
PREFIX_OPS: dict[str, int] = {"not": 900, "\\+": 900}

_SPACED = {"+": " + ", ";": " ; ", "->": " -> "}
_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_ARG_PRIORITY = 999


def format_atom(name: str) -> str:
    """Quote ``name`` unless it reads back as the same bare atom."""
    if name == NIL.name or (_PLAIN_ATOM.match(name) and name not in PREFIX_OPS):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_term(term: Term, *, var_style: str = "name") -> str:
    """Render ``term``; ``var_style='serial'`` prints variables as ``_G<serial>``."""
    return _fmt(term, 1200, var_style)


def _fmt(t: Term, max_priority: int, var_style: str) -> str:
    if isinstance(t, Var):
        if var_style == "serial" or t.name.startswith("_"):
            return f"_G{t.serial}"
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Const):
        return format_atom(t.name)

    if t.functor == CONS and len(t.args) == 2:
        return _fmt_list(t, var_style)

    if len(t.args) == 2 and t.functor in INFIX_OPS:
        priority, kind = INFIX_OPS[t.functor]
        left_max = priority - 1 if kind[0] == "x" else priority
        right_max = priority - 1 if kind[2] == "x" else priority
        text = (_fmt(t.args[0], left_max, var_style)
                + _SPACED.get(t.functor, t.functor)
                + _fmt(t.args[1], right_max, var_style))
        return f"({text})" if priority > max_priority else text

    if len(t.args) == 1 and t.functor in PREFIX_OPS:
        priority = PREFIX_OPS[t.functor]
        text = f"{t.functor} {_fmt(t.args[0], priority, var_style)}"
        return f"({text})" if priority > max_priority else text

    args = ",".join(_fmt(a, _ARG_PRIORITY, var_style) for a in t.args)
    functor = "'[]'" if t.functor == NIL.name else format_atom(t.functor)
    return f"{functor}({args})"


def _fmt_list(t: Term, var_style: str) -> str:
    items: list[str] = []
    while isinstance(t, Compound) and t.functor == CONS and len(t.args) == 2:
        items.append(_fmt(t.args[0], _ARG_PRIORITY, var_style))
        t = t.args[1]
    tail = "" if t == NIL else "|" + _fmt(t, _ARG_PRIORITY, var_style)
    return "[" + ",".join(items) + tail + "]"


# ── Goals and rules ───────────────────────────────────────────────────

def goal_to_term(goal: Goal) -> Term:
    if isinstance(goal, TrueGoal):
        return Const("true")
    if isinstance(goal, FailGoal):
        return Const("fail")
    if isinstance(goal, Call):
        return struct(goal.functor, *goal.args)
    if isinstance(goal, Builtin):
        return struct(goal.name, *goal.args)
    if isinstance(goal, And):
        return Compound(",", (goal_to_term(goal.left), goal_to_term(goal.right)))
    if isinstance(goal, Or):
        return Compound(";", (goal_to_term(goal.left), goal_to_term(goal.right)))
    if isinstance(goal, IfThenElse):
        cond = Compound("->", (goal_to_term(goal.cond), goal_to_term(goal.then)))
        return Compound(";", (cond, goal_to_term(goal.orelse)))
    raise TypeError(f"not a goal: {goal!r}")


def format_goal(goal: Goal) -> str:
    return format_term(goal_to_term(goal))


def _conj(goals: tuple) -> str:
    return ",".join(_fmt(goal_to_term(g), _ARG_PRIORITY, "name") for g in goals)


def format_rule(rule: Rule) -> str:
    """One-line rule text: ``kept \\ removed <=> ask & tell | body``."""
    heads = []
    for position, head in enumerate(rule.heads):
        text = _fmt(head, _ARG_PRIORITY, "name")
        if position in rule.passive:
            text += f"#Id{position}"
        heads.append(text)
    kept, removed = heads[:len(rule.kept_heads)], heads[len(rule.kept_heads):]

    if kept and removed:
        text = f"{', '.join(kept)} \\ {', '.join(removed)} <=> "
    elif removed:
        text = f"{', '.join(removed)} <=> "
    else:
        text = f"{', '.join(kept)} ==> "

    if rule.guard_ask and rule.guard_tell:
        text += f"{_conj(rule.guard_ask)} & {_conj(rule.guard_tell)} | "
    elif rule.guard_ask or rule.guard_tell:
        text += f"{_conj(rule.guard_ask or rule.guard_tell)} | "
    text += format_goal(rule.body)

    if rule.passive:
        text += " pragma " + ", ".join(f"passive(Id{p})" for p in sorted(rule.passive))
    return text


def format_program(program: Program) -> list[str]:
    return [format_rule(rule) for rule in program.rules]


def dump_store(store: "Store") -> list[str]:
    """One line per live constraint, in id order."""
    return [format_term(store.bindings.resolve(c.term()), var_style="serial")
            for c in store.live()]
