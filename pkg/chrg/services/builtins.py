"""Builtin router: evaluates builtin goals against the store.

The router is the bridge between a rule's builtin goals and their
Python implementations. For a goal like ``member(R, [+, ')'])`` it:

1. Looks up ``(name, arity)`` in the builtin map
2. Dereferences the arguments through the store's bindings
3. Runs the handler in the requested mode
4. Reports success, failure, or a stream of alternative solutions

Modes:
    ask   : guard test; may inspect but never bind.
    call  : body / condition position; may bind (trailed) and may have
            several solutions.

Usage:
    router = BuiltinRouter(store)
    router.ask(Builtin("<", (Int(1), Int(2))))           # True
    for _ in router.solve(Builtin("member", (X, lst))):   # one pass per solution
        ...
"""
from __future__ import annotations

from typing import Callable, Iterator

import structlog

from chrg.models.rules import And, Builtin, FailGoal, Goal, Or, TrueGoal, term_to_goal
from chrg.models.terms import Compound, Const, Int, Term, functor_key, list_items, term_vars
from chrg.services.hypotheses import all_consumed
from chrg.services.store import Store
from chrg.services.unification import match_into
from chrg.utils.exceptions import BuiltinError

logger = structlog.get_logger(__name__)

Solutions = Iterator[None]

_NONDETERMINISTIC = frozenset({("member", 2), ("find_constraint", 2)})


class BuiltinRouter:
    """Maps builtin (name, arity) pairs to their ask and call handlers.

    Args:
        store: The store whose bindings and constraints builtins see.
    """

    def __init__(self, store: Store) -> None:
        self._store = store
        self._bindings = store.bindings

        # Map: (name, arity) → (ask handler, call handler)
        # An ask handler returns a bool; a call handler yields once per solution.
        self._builtin_map: dict[tuple[str, int], tuple[Callable, Callable]] = {
            ("=", 2):               (self._ask_identical, self._call_unify),
            ("\\=", 2):             (self._ask_not_unifiable, self._test(self._ask_not_unifiable)),
            ("==", 2):              (self._ask_identical, self._test(self._ask_identical)),
            ("\\==", 2):            (self._ask_not_identical, self._test(self._ask_not_identical)),
            ("<", 2):               (self._compare(lambda a, b: a < b), None),
            (">", 2):               (self._compare(lambda a, b: a > b), None),
            ("=<", 2):              (self._compare(lambda a, b: a <= b), None),
            (">=", 2):              (self._compare(lambda a, b: a >= b), None),
            ("integer", 1):         (self._ask_integer, None),
            ("member", 2):          (self._ask_member, self._call_member),
            ("find_constraint", 2): (self._ask_find_constraint, self._call_find_constraint),
            ("all_consumed", 0):    (self._ask_all_consumed, None),
            ("\\+", 1):             (self._ask_negation, None),
        }

    @property
    def available_builtins(self) -> list[tuple[str, int]]:
        """Return the (name, arity) pairs this router evaluates."""
        return list(self._builtin_map)

    # ── Public API ────────────────────────────────────────────────────

    def ask(self, goal: Goal) -> bool:
        """Evaluate a guard goal without binding any variable."""
        if isinstance(goal, TrueGoal):
            return True
        if isinstance(goal, FailGoal):
            return False
        if isinstance(goal, And):
            return self.ask(goal.left) and self.ask(goal.right)
        if isinstance(goal, Or):
            return self.ask(goal.left) or self.ask(goal.right)
        if not isinstance(goal, Builtin):
            raise BuiltinError(type(goal).__name__, "only builtins may appear in a guard")
        ask_handler, _ = self._lookup(goal)
        return ask_handler(*goal.args)

    def solve(self, goal: Goal) -> Solutions:
        """Yield once per solution of a builtin goal, bindings in place.

        The caller undoes bindings of a solution (``store.undo_to``) before
        asking for the next one.
        """
        if isinstance(goal, TrueGoal):
            yield
        elif isinstance(goal, FailGoal):
            return
        elif isinstance(goal, And):
            for _ in self.solve(goal.left):
                yield from self.solve(goal.right)
        elif isinstance(goal, Or):
            mark = self._store.mark()
            yield from self.solve(goal.left)
            self._store.undo_to(mark)
            yield from self.solve(goal.right)
        elif isinstance(goal, Builtin):
            ask_handler, call_handler = self._lookup(goal)
            if call_handler is None:
                if ask_handler(*goal.args):
                    yield
            else:
                yield from call_handler(*goal.args)
        else:
            raise BuiltinError(type(goal).__name__, "only builtins may appear in a condition")

    def execute(self, goal: Builtin) -> Solutions:
        """Run a builtin in body position (alias of ``solve`` with logging)."""
        logger.debug("builtin_execution", builtin=goal.name, arity=len(goal.args))
        return self.solve(goal)

    def is_deterministic(self, goal: Builtin) -> bool:
        """Whether ``goal`` has at most one solution."""
        self._lookup(goal)
        return goal.key not in _NONDETERMINISTIC

    # ── Handlers: ask ─────────────────────────────────────────────────

    def _ask_identical(self, a: Term, b: Term) -> bool:
        return self._bindings.identical(a, b)

    def _ask_not_identical(self, a: Term, b: Term) -> bool:
        return not self._bindings.identical(a, b)

    def _ask_not_unifiable(self, a: Term, b: Term) -> bool:
        return not self._bindings.unifiable(a, b)

    def _ask_integer(self, a: Term) -> bool:
        return isinstance(self._bindings.walk(a), Int)

    def _ask_member(self, x: Term, items: Term) -> bool:
        return any(self._bindings.identical(x, item) for item in self._items("member", items))

    def _ask_find_constraint(self, pattern: Term, cid: Term) -> bool:
        return next(self._find(pattern, cid), None) is not None

    def _ask_all_consumed(self) -> bool:
        return all_consumed(self._store)

    def _ask_negation(self, goal_term: Term) -> bool:
        goal = term_to_goal(self._bindings.resolve(goal_term))
        mark = self._store.mark()
        try:
            return next(self.solve(goal), False) is False
        finally:
            self._store.undo_to(mark)

    def _compare(self, op: Callable[[int, int], bool]) -> Callable[[Term, Term], bool]:
        def handler(a: Term, b: Term) -> bool:
            x, y = self._bindings.walk(a), self._bindings.walk(b)
            if not isinstance(x, Int) or not isinstance(y, Int):
                raise BuiltinError("compare", f"integer arguments expected, got {x!r} and {y!r}")
            return op(x.value, y.value)

        return handler

    # ── Handlers: call ────────────────────────────────────────────────

    def _call_unify(self, a: Term, b: Term) -> Solutions:
        if self._bindings.unify(a, b):
            yield

    def _call_member(self, x: Term, items: Term) -> Solutions:
        for item in self._items("member", items):
            mark = self._store.mark()
            if self._bindings.unify(x, item):
                yield
            self._store.undo_to(mark)

    def _call_find_constraint(self, pattern: Term, cid: Term) -> Solutions:
        variables = {v.serial: v for v in term_vars(self._bindings.resolve(pattern),
                                                    self._bindings.resolve(cid))}
        for env in list(self._find(pattern, cid)):
            mark = self._store.mark()
            for serial, value in env.items():
                self._bindings.bind(variables[serial], value)
            yield
            self._store.undo_to(mark)

    # ── Private Helpers ───────────────────────────────────────────────

    def _lookup(self, goal: Builtin) -> tuple[Callable, Callable | None]:
        handlers = self._builtin_map.get(goal.key)
        if handlers is None:
            raise BuiltinError(goal.name, f"unknown builtin {goal.name}/{len(goal.args)}")
        return handlers

    @staticmethod
    def _test(ask_handler: Callable[..., bool]) -> Callable[..., Solutions]:
        def handler(*args: Term) -> Solutions:
            if ask_handler(*args):
                yield

        return handler

    def _items(self, name: str, items: Term) -> list[Term]:
        resolved = self._bindings.resolve(items)
        elements = list_items(resolved)
        if elements is None:
            raise BuiltinError(name, f"proper list expected, got {resolved!r}")
        return elements

    def _find(self, pattern: Term, cid: Term) -> Iterator[dict[int, Term]]:
        """Matchers of live constraints against ``pattern`` (and id ``cid``), ascending ids."""
        pattern = self._bindings.resolve(pattern)
        if not isinstance(pattern, (Compound, Const)):
            raise BuiltinError("find_constraint", f"callable pattern expected, got {pattern!r}")
        wanted = self._bindings.resolve(cid)
        functor, arity = functor_key(pattern)
        for c in self._store.lookup(functor, arity):
            env: dict[int, Term] = {}
            if not match_into(pattern, c.term(), env, self._bindings.walk):
                continue
            if not match_into(wanted, Int(c.id), env):
                continue
            yield env
