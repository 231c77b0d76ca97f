"""Constraint store with propagation history, variable bindings and trail.

Every mutation (insert, kill, history record, variable binding) is pushed
on one trail, so ``undo_to(mark)`` restores the exact earlier state.

Lookups go through two indexes:

- ``(functor, arity)`` → ascending list of live ids;
- ``(functor, arity, position, value)`` → ascending list of live ids whose
  argument at ``position`` was ground and equal to ``value`` at insertion.

A bound-argument lookup uses the second index unless some live
constraint of that functor had a non-ground argument at that position.
Killed constraints leave the id lists but stay in the id table as
tombstones until their insertion is undone.
"""
from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass
from typing import Iterable, Iterator

from chrg.models.terms import Compound, Term, Var, is_ground, struct
from chrg.services.unification import identical, resolve, unify_into, walk
from chrg.utils.exceptions import EngineError

_EMPTY: list[int] = []


class Constraint:
    __slots__ = ("id", "functor", "args", "alive")

    def __init__(self, cid: int, functor: str, args: tuple) -> None:
        self.id = cid
        self.functor = functor
        self.args = args
        self.alive = True

    @property
    def key(self) -> tuple[str, int]:
        return self.functor, len(self.args)

    def term(self) -> Term:
        return struct(self.functor, *self.args)

    def __repr__(self) -> str:
        state = "" if self.alive else " dead"
        return f"<Constraint #{self.id} {self.functor}/{len(self.args)}{state}>"


class Trail:
    """Undo log: ``(kind, payload)`` entries, newest last."""

    def __init__(self) -> None:
        self._entries: list[tuple[str, object]] = []

    def push(self, kind: str, payload: object) -> None:
        self._entries.append((kind, payload))

    def mark(self) -> int:
        return len(self._entries)

    def pop_to(self, mark: int) -> Iterator[tuple[str, object]]:
        """Pop entries newer than ``mark``; a mark at or past the end pops nothing."""
        entries = self._entries
        while len(entries) > mark:
            yield entries.pop()

    def __len__(self) -> int:
        return len(self._entries)


class Bindings:
    """Global variable bindings for variables living in the store."""

    def __init__(self, trail: Trail) -> None:
        self._env: dict[int, Term] = {}
        self._trail = trail

    def walk(self, term: Term) -> Term:
        return walk(term, self._env)

    def resolve(self, term: Term) -> Term:
        return resolve(term, self._env)

    def bind(self, var: Var, term: Term) -> None:
        if var.serial in self._env:
            raise EngineError(f"variable {var.name} is already bound")
        self._env[var.serial] = term
        self._trail.push("bind", var.serial)

    def unify(self, a: Term, b: Term) -> bool:
        """Unify with trailed bindings; on failure the caller undoes to its mark."""
        return unify_into(a, b, self.walk, self.bind)

    def unifiable(self, a: Term, b: Term) -> bool:
        """Whether ``a`` and ``b`` unify, without binding anything."""
        scratch: dict[int, Term] = {}
        env = self._env

        def walk_both(t: Term) -> Term:
            while isinstance(t, Var):
                if t.serial in scratch:
                    t = scratch[t.serial]
                elif t.serial in env:
                    t = env[t.serial]
                else:
                    break
            return t

        return unify_into(a, b, walk_both, lambda v, t: scratch.__setitem__(v.serial, t))

    def identical(self, a: Term, b: Term) -> bool:
        return identical(a, b, self.walk)

    def _unbind(self, serial: int) -> None:
        del self._env[serial]

    def as_dict(self) -> dict[int, Term]:
        return dict(self._env)

    def __len__(self) -> int:
        return len(self._env)


class PropagationHistory:
    """Set of (rule index, head ids) tuples already fired by propagation rules."""

    def __init__(self, trail: Trail) -> None:
        self._seen: set[tuple[int, tuple[int, ...]]] = set()
        self._trail = trail

    def seen(self, rule_id: int, ids: tuple[int, ...]) -> bool:
        return (rule_id, ids) in self._seen

    def record(self, rule_id: int, ids: tuple[int, ...]) -> None:
        entry = (rule_id, ids)
        self._seen.add(entry)
        self._trail.push("history", entry)

    def _forget(self, entry: tuple[int, tuple[int, ...]]) -> None:
        self._seen.discard(entry)

    def entries(self) -> frozenset:
        return frozenset(self._seen)

    def __len__(self) -> int:
        return len(self._seen)


@dataclass(frozen=True)
class StoreSnapshot:
    constraints: tuple
    history: frozenset
    bindings: dict


class Store:
    """The constraint store.

    Args:
        ground_only: Reject constraints with unbound variables.
        ground_keys: (functor, arity) pairs that must always be ground,
            whatever ``ground_only`` says.
    """

    def __init__(self, *, ground_only: bool = True, ground_keys: Iterable = ()) -> None:
        self.trail = Trail()
        self.bindings = Bindings(self.trail)
        self.history = PropagationHistory(self.trail)
        self.ground_only = ground_only
        self.ground_keys = frozenset(ground_keys)
        self._next_id = 1
        self._constraints: dict[int, Constraint] = {}
        self._by_key: dict[tuple[str, int], list[int]] = {}
        self._by_arg: dict[tuple, list[int]] = {}
        self._open: dict[tuple[str, int, int], int] = {}
        self._live = 0

    # ── Mutation ──────────────────────────────────────────────────────

    def insert(self, functor: str, args: Iterable[Term] = ()) -> int:
        """Add a live constraint and return its fresh id."""
        args = tuple(self.bindings.resolve(a) for a in args)
        key = (functor, len(args))
        if (self.ground_only or key in self.ground_keys) and not all(is_ground(a) for a in args):
            raise EngineError(f"constraint {functor}/{len(args)} inserted with unbound arguments")

        cid = self._next_id
        self._next_id += 1
        c = Constraint(cid, functor, args)
        self._constraints[cid] = c
        self._link(c, append=True)
        self.trail.push("insert", cid)
        return cid

    def kill(self, cid: int) -> None:
        c = self._constraints.get(cid)
        if c is None or not c.alive:
            raise EngineError(f"cannot kill constraint #{cid}: not alive")
        c.alive = False
        self._unlink(c)
        self.trail.push("kill", cid)

    def mark(self) -> int:
        return self.trail.mark()

    def undo_to(self, mark: int) -> int:
        """Revert every mutation recorded after ``mark``; return how many were undone."""
        undone = 0
        for kind, payload in self.trail.pop_to(mark):
            undone += 1
            if kind == "insert":
                c = self._constraints.pop(payload)
                if c.alive:
                    self._unlink(c)
            elif kind == "kill":
                c = self._constraints[payload]
                c.alive = True
                self._link(c, append=False)
            elif kind == "history":
                self.history._forget(payload)
            elif kind == "bind":
                self.bindings._unbind(payload)
        return undone

    # ── Queries ───────────────────────────────────────────────────────

    def get(self, cid: int) -> Constraint:
        return self._constraints[cid]

    def is_alive(self, cid: int) -> bool:
        c = self._constraints.get(cid)
        return c is not None and c.alive

    def ids(self, functor: str, arity: int) -> list[int]:
        """Live ids of ``functor/arity`` in ascending order (do not mutate)."""
        return self._by_key.get((functor, arity), _EMPTY)

    def lookup(self, functor: str, arity: int) -> Iterator[Constraint]:
        for cid in list(self.ids(functor, arity)):
            c = self._constraints[cid]
            if c.alive:
                yield c

    def candidates(self, functor: str, arity: int, bound: Iterable[tuple[int, Term]]) -> list[int]:
        """Smallest ascending id list covering every live constraint that may
        have the given ground values at the given argument positions."""
        best = self._by_key.get((functor, arity), _EMPTY)
        for position, value in bound:
            if self._open.get((functor, arity, position)):
                continue
            ids = self._by_arg.get((functor, arity, position, value), _EMPTY)
            if len(ids) < len(best):
                best = ids
                if not best:
                    break
        return best

    def live(self) -> Iterator[Constraint]:
        for c in self._constraints.values():
            if c.alive:
                yield c

    def terms(self) -> list[Term]:
        """Live constraints as resolved terms, in id order."""
        return [self.bindings.resolve(c.term()) for c in self.live()]

    def __len__(self) -> int:
        return self._live

    def snapshot(self) -> StoreSnapshot:
        return StoreSnapshot(
            constraints=tuple((c.id, c.functor, tuple(self.bindings.resolve(a) for a in c.args))
                              for c in self.live()),
            history=self.history.entries(),
            bindings=self.bindings.as_dict(),
        )

    def dump(self) -> list[str]:
        from chrg.syntax.printer import dump_store

        return dump_store(self)

    # ── Private Helpers ───────────────────────────────────────────────

    def _index_slots(self, c: Constraint) -> Iterator[tuple[bool, tuple]]:
        """(is_list, key) for every index entry ``c`` belongs to."""
        f, n = c.functor, len(c.args)
        for position, arg in enumerate(c.args):
            if isinstance(arg, Var) or (isinstance(arg, Compound) and not is_ground(arg)):
                yield False, (f, n, position)
            else:
                yield True, (f, n, position, arg)

    def _link(self, c: Constraint, *, append: bool) -> None:
        lists = [self._by_key.setdefault(c.key, [])]
        for is_list, key in self._index_slots(c):
            if is_list:
                lists.append(self._by_arg.setdefault(key, []))
            else:
                self._open[key] = self._open.get(key, 0) + 1
        for ids in lists:
            if append and (not ids or ids[-1] < c.id):
                ids.append(c.id)
            else:
                insort(ids, c.id)
        self._live += 1

    def _unlink(self, c: Constraint) -> None:
        lists = [self._by_key[c.key]]
        for is_list, key in self._index_slots(c):
            if is_list:
                lists.append(self._by_arg[key])
            else:
                self._open[key] -= 1
        for ids in lists:
            if ids and ids[-1] == c.id:
                ids.pop()
            else:
                del ids[bisect_left(ids, c.id)]
        self._live -= 1
