"""Tests for the constraint store, its indexes and the trail."""
from __future__ import annotations

import random

import pytest

from chrg.models.terms import Const, Int, Var, struct
from chrg.services.store import Store
from chrg.utils.exceptions import EngineError


@pytest.fixture
def store():
    return Store()


def _token(store: Store, value: str, i: int) -> int:
    return store.insert("token", (Const(value), Int(i), Int(i + 1)))


class TestInsertKill:
    def test_ids_ascend(self, store):
        ids = [_token(store, "a", i) for i in range(3)]
        assert ids == [1, 2, 3]
        assert len(store) == 3

    def test_kill(self, store):
        cid = _token(store, "a", 0)
        store.kill(cid)
        assert not store.is_alive(cid)
        assert len(store) == 0
        assert store.ids("token", 3) == []

    def test_kill_twice(self, store):
        cid = _token(store, "a", 0)
        store.kill(cid)
        with pytest.raises(EngineError, match="not alive"):
            store.kill(cid)

    def test_ground_only(self, store):
        with pytest.raises(EngineError, match="unbound arguments"):
            store.insert("np", (Var("X", 1), Int(0)))

    def test_ground_keys_enforced_in_open_store(self):
        store = Store(ground_only=False, ground_keys={("+", 3)})
        store.insert("np", (Var("X", 1),))
        with pytest.raises(EngineError):
            store.insert("+", (Const("p"), Var("X", 1), Int(0)))


class TestQueries:
    def test_lookup_in_id_order(self, store):
        for i, v in enumerate("abab"):
            _token(store, v, i)
        store.insert("np", (Int(0), Int(1)))
        assert [c.id for c in store.lookup("token", 3)] == [1, 2, 3, 4]

    def test_candidates_use_argument_index(self, store):
        for i, v in enumerate("abab"):
            _token(store, v, i)
        assert store.candidates("token", 3, [(0, Const("b"))]) == [2, 4]
        assert store.candidates("token", 3, [(0, Const("b")), (1, Int(3))]) == [4]
        assert store.candidates("token", 3, [(0, Const("c"))]) == []

    def test_candidates_ignore_index_when_open(self):
        store = Store(ground_only=False)
        store.insert("p", (Const("a"),))
        store.insert("p", (Var("X", 1),))
        # the variable might later be bound to b
        assert store.candidates("p", 1, [(0, Const("b"))]) == [1, 2]

    def test_terms_resolve_bindings(self):
        store = Store(ground_only=False)
        x = Var("X", 1)
        store.insert("p", (x,))
        assert store.bindings.unify(x, Const("a"))
        assert store.terms() == [struct("p", Const("a"))]
        assert store.dump() == ["p(a)"]

    def test_dump_prints_unbound_as_serial(self):
        store = Store(ground_only=False)
        store.insert("p", (Var("X", 41),))
        assert store.dump() == ["p(_G41)"]


class TestTrail:
    def test_undo_insert_and_kill(self, store):
        a = _token(store, "a", 0)
        mark = store.mark()
        b = _token(store, "b", 1)
        store.kill(a)
        store.undo_to(mark)
        assert store.is_alive(a)
        assert not store.is_alive(b)
        assert [c.id for c in store.lookup("token", 3)] == [a]

    def test_undo_history(self, store):
        mark = store.mark()
        store.history.record(0, (1, 2))
        assert store.history.seen(0, (1, 2))
        store.undo_to(mark)
        assert not store.history.seen(0, (1, 2))

    def test_undo_bindings(self):
        store = Store(ground_only=False)
        x = Var("X", 1)
        mark = store.mark()
        store.bindings.unify(x, Int(3))
        store.undo_to(mark)
        assert store.bindings.walk(x) == x

    def test_bind_twice_rejected(self):
        store = Store(ground_only=False)
        x = Var("X", 1)
        store.bindings.bind(x, Int(1))
        with pytest.raises(EngineError, match="already bound"):
            store.bindings.bind(x, Int(2))

    def test_undo_past_end_is_noop(self, store):
        _token(store, "a", 0)
        assert store.undo_to(store.mark() + 5) == 0

    def test_unifiable_does_not_bind(self):
        store = Store(ground_only=False)
        x = Var("X", 1)
        assert store.bindings.unifiable(struct("f", x), struct("f", Int(1)))
        assert len(store.bindings) == 0

    def test_random_round_trip(self):
        """Any mutation sequence undone to a mark restores the exact snapshot."""
        rng = random.Random(11)
        store = Store(ground_only=False)
        variables = [Var(f"V{i}", 100 + i) for i in range(6)]
        for round_ in range(50):
            before = store.snapshot()
            mark = store.mark()
            for _ in range(rng.randint(1, 12)):
                action = rng.random()
                live = [c.id for c in store.live()]
                if action < 0.4 or not live:
                    arg = rng.choice([Const(rng.choice("ab")), Int(rng.randint(0, 4)), rng.choice(variables)])
                    store.insert(rng.choice(["p", "q"]), (arg,))
                elif action < 0.7:
                    store.kill(rng.choice(live))
                elif action < 0.85:
                    store.history.record(rng.randint(0, 3), tuple(rng.sample(live, min(2, len(live)))))
                else:
                    store.bindings.unify(rng.choice(variables), Int(rng.randint(0, 4)))
            store.undo_to(mark)
            assert store.snapshot() == before, f"round {round_}"
            # keep some state between rounds
            store.insert("p", (Const("a"),))
        assert len(store.trail) > 0
