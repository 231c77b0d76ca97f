"""Matching, unification and substitution over first-order terms.

Two flavours of every operation exist:

- the public, persistent API (``match``, ``unify``, ``apply``) working on
  immutable ``Substitution`` values, returning ``None`` when no matcher or
  unifier exists;
- ``*_into`` helpers mutating a plain ``{serial: Term}`` environment,
  used by the engine's inner loop.

Usage:
    s = unify(parse_term("f(X, b)"), parse_term("f(a, Y)"))
    apply(parse_term("g(X, Y)"), s)   # g(a, b)
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import replace
from typing import Callable, Iterator, Mapping

from chrg.models.rules import Rule, map_goal
from chrg.models.terms import Compound, Term, Var

Env = dict
Deref = Callable[[Term], Term]


class SerialCounter:
    """Thread-safe source of variable serial numbers."""

    def __init__(self, start: int = 1) -> None:
        self._count = itertools.count(start)
        self._lock = threading.Lock()

    def next(self) -> int:
        with self._lock:
            return next(self._count)

    def fresh(self, name: str = "_") -> Var:
        return Var(name, self.next())


# Shared by the reader, the compiler and every engine so serials never clash.
SERIALS = SerialCounter()


# ── Environment helpers ───────────────────────────────────────────────

def walk(term: Term, env: Env) -> Term:
    while isinstance(term, Var):
        bound = env.get(term.serial)
        if bound is None:
            return term
        term = bound
    return term


def resolve(term: Term, env: Env) -> Term:
    """Substitute ``env`` into ``term`` all the way down."""
    term = walk(term, env)
    if isinstance(term, Compound):
        args = tuple(resolve(a, env) for a in term.args)
        if any(a is not b for a, b in zip(args, term.args)):
            return Compound(term.functor, args)
    return term


def identical(a: Term, b: Term, deref: Deref | None = None) -> bool:
    """Structural identity, looking through ``deref`` at every level."""
    if deref is not None:
        a, b = deref(a), deref(b)
    if a is b:
        return True
    if isinstance(a, Compound):
        if not isinstance(b, Compound) or a.functor != b.functor or len(a.args) != len(b.args):
            return False
        return all(identical(x, y, deref) for x, y in zip(a.args, b.args))
    return a == b


def match_into(pattern: Term, target: Term, env: Env, deref: Deref | None = None) -> bool:
    """One-way match: extend ``env`` so that ``pattern`` becomes ``target``.

    Only pattern variables are bound. Unbound variables in the target are
    treated as constants, so a non-variable pattern never matches them.
    ``env`` may be partially extended on failure.
    """
    if deref is not None:
        target = deref(target)
    if isinstance(pattern, Var):
        bound = env.get(pattern.serial)
        if bound is None:
            env[pattern.serial] = target
            return True
        return identical(bound, target, deref)
    if isinstance(pattern, Compound):
        if (not isinstance(target, Compound) or target.functor != pattern.functor
                or len(target.args) != len(pattern.args)):
            return False
        for p, t in zip(pattern.args, target.args):
            if not match_into(p, t, env, deref):
                return False
        return True
    return pattern == target


def occurs(var: Var, term: Term, walk_fn: Deref) -> bool:
    term = walk_fn(term)
    if isinstance(term, Var):
        return term.serial == var.serial
    if isinstance(term, Compound):
        return any(occurs(var, a, walk_fn) for a in term.args)
    return False


def unify_into(a: Term, b: Term, walk_fn: Deref, bind: Callable[[Var, Term], None]) -> bool:
    """Robinson unification with occurs check over an abstract binding space.

    ``walk_fn`` dereferences a term one variable chain deep, ``bind``
    records a new binding. Bindings made before a failure are not undone.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = walk_fn(x), walk_fn(y)
        if x is y:
            continue
        if isinstance(x, Var):
            if isinstance(y, Var) and x.serial == y.serial:
                continue
            if occurs(x, y, walk_fn):
                return False
            bind(x, y)
        elif isinstance(y, Var):
            if occurs(y, x, walk_fn):
                return False
            bind(y, x)
        elif isinstance(x, Compound):
            if (not isinstance(y, Compound) or x.functor != y.functor
                    or len(x.args) != len(y.args)):
                return False
            stack.extend(zip(x.args, y.args))
        elif x != y:
            return False
    return True


# ── Substitution ──────────────────────────────────────────────────────

class Substitution(Mapping[Var, Term]):
    """Immutable finite map from variables to terms."""

    __slots__ = ("_env", "_vars")

    def __init__(self, bindings: Mapping[Var, Term] | None = None) -> None:
        self._env: dict[int, Term] = {}
        self._vars: dict[int, Var] = {}
        for var, term in (bindings or {}).items():
            self._env[var.serial] = term
            self._vars[var.serial] = var

    @classmethod
    def _build(cls, env: dict[int, Term], variables: dict[int, Var]) -> "Substitution":
        s = cls()
        s._env = env
        s._vars = variables
        return s

    def __getitem__(self, var: Var) -> Term:
        return self._env[var.serial]

    def __contains__(self, var: object) -> bool:
        return isinstance(var, Var) and var.serial in self._env

    def __iter__(self) -> Iterator[Var]:
        return iter(self._vars.values())

    def __len__(self) -> int:
        return len(self._env)

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name}#{v.serial}: {self._env[s]!r}" for s, v in self._vars.items())
        return f"Substitution({{{inner}}})"

    def walk(self, term: Term) -> Term:
        return walk(term, self._env)

    def resolve(self, term: Term) -> Term:
        return resolve(term, self._env)


EMPTY = Substitution()


# ── Public API ────────────────────────────────────────────────────────

def match(
    pattern: Term,
    target: Term,
    s: Substitution = EMPTY,
    deref: Deref | None = None,
) -> Substitution | None:
    """Extend ``s`` so that ``apply(pattern, result) == target``.

    Returns None when ``target`` is not an instance of ``pattern``.
    """
    env = dict(s._env)
    if not match_into(pattern, target, env, deref):
        return None
    variables = dict(s._vars)
    for var in _pattern_vars(pattern):
        variables.setdefault(var.serial, var)
    return Substitution._build(env, variables)


def unify(t1: Term, t2: Term, s: Substitution = EMPTY) -> Substitution | None:
    """Most general unifier of ``t1`` and ``t2`` extending ``s`` (None if none)."""
    env = dict(s._env)
    variables = dict(s._vars)

    def bind(var: Var, term: Term) -> None:
        env[var.serial] = term
        variables[var.serial] = var

    if not unify_into(t1, t2, lambda t: walk(t, env), bind):
        return None
    return Substitution._build(env, variables)


def apply(term: Term, s: Substitution) -> Term:
    return resolve(term, s._env)


def rename_apart(rule: Rule, counter: SerialCounter = SERIALS) -> Rule:
    """Copy ``rule`` with every variable replaced by a fresh one."""
    mapping: dict[int, Term] = {v.serial: counter.fresh(v.name) for v in rule.variables()}

    def fn(t: Term) -> Term:
        return resolve(t, mapping)

    return replace(
        rule,
        kept_heads=tuple(fn(h) for h in rule.kept_heads),
        removed_heads=tuple(fn(h) for h in rule.removed_heads),
        guard_ask=tuple(map_goal(g, fn) for g in rule.guard_ask),
        guard_tell=tuple(map_goal(g, fn) for g in rule.guard_tell),
        body=map_goal(rule.body, fn),
    )


def _pattern_vars(term: Term) -> Iterator[Var]:
    if isinstance(term, Var):
        yield term
    elif isinstance(term, Compound):
        for a in term.args:
            yield from _pattern_vars(a)
