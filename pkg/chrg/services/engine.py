"""CHR engine: refined operational semantics with chronological backtracking.

The engine is the central loop of the toolkit. For every goal it:

1. Inserts constraints and activates them depth-first
2. Tries the active constraint's occurrences in rule order, searching
   partners in ascending id order
3. Fires the first applicable rule instance (ask guard holds, tell
   guard succeeds, propagation history not yet recorded)
4. Runs the rule body before resuming the interrupted activation
5. On failure, undoes the trail to the newest choice point and takes
   its next alternative

Control state is an explicit continuation (a linked list of frames), so
derivation depth is bounded by memory, not by Python's recursion limit.
Choice points record a trail mark, the continuation to resume and the
alternative to take; they are global and survive across goals.

Usage:
    program = build_program(rules)
    engine = Engine(program)
    result = engine.run([parse_term("token(peter,0,1)")])
    print(result.success, engine.store.dump())
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import structlog

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
    conjunction,
    map_goal,
)
from chrg.models.terms import Compound, Const, Term, Var, functor_key, is_ground, term_args, term_vars
from chrg.services.builtins import BuiltinRouter
from chrg.services.store import Constraint, Store
from chrg.services.trace_logger import TraceLogger
from chrg.services.unification import SERIALS, SerialCounter, match_into, rename_apart, resolve
from chrg.syntax.printer import format_term
from chrg.utils.exceptions import EngineError

logger = structlog.get_logger(__name__)

_STOP = object()


class Outcome(str, Enum):
    CONTINUE = "continue"
    FAIL_BRANCH = "fail"


def build_program(
    rules: Iterable[Rule],
    ground_keys: Iterable[tuple[str, int]] = (),
    counter: SerialCounter = SERIALS,
) -> Program:
    """Rename every rule apart and index the occurrences."""
    return Program(tuple(rename_apart(r, counter) for r in rules), frozenset(ground_keys))


# ── Frames ────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class GoalFrame:
    goal: Goal


@dataclass(frozen=True, slots=True)
class ActivationFrame:
    """Continue activating ``cid`` at occurrence ``occurrence``, after ``cursor``."""

    cid: int
    occurrence: int
    cursor: tuple | None


@dataclass(frozen=True, slots=True)
class OccurrenceFrame:
    """Try a single (rule, head) occurrence for ``cid`` until it no longer fires."""

    cid: int
    rule_index: int
    position: int
    cursor: tuple | None


@dataclass(frozen=True, slots=True)
class RetryFrame:
    """Alternative of a choice rule: fire the next partner set or fail."""

    cid: int
    rule_index: int
    position: int
    cursor: tuple


@dataclass(slots=True)
class ChoicePoint:
    mark: int
    cont: object
    alternative: object = None
    solutions: Iterator | None = None
    resume_mark: int = 0


_FAILED = object()


@dataclass(slots=True)
class _Plan:
    """Precomputed search plan for one (rule, active head) pair."""

    rule_index: int
    rule: Rule
    position: int
    active_args: tuple
    partners: tuple            # head positions in search order
    partner_keys: tuple        # (functor, arity) per partner
    partner_args: tuple        # pattern args per partner
    index_args: tuple          # per partner: ((arg position, pattern arg), ...)
    removed: tuple
    propagation: bool
    variables: tuple


@dataclass
class RunResult:
    success: bool
    store: Store
    firings: int
    trace: TraceLogger | None = None

    @property
    def constraints(self) -> list[Term]:
        return self.store.terms()

    def dump(self) -> list[str]:
        return self.store.dump()


@dataclass(frozen=True)
class Solution:
    """A final store captured when a derivation succeeded."""

    lines: tuple
    terms: tuple = field(repr=False)
    firings: int = 0


class Engine:
    """Executes a CHR program over one store.

    Args:
        program: The program to run (see ``build_program``).
        trace: Optional trace recorder.
        max_firings: Abort with EngineError after this many firings.
        counter: Source of fresh variable serials.
    """

    def __init__(
        self,
        program: Program,
        *,
        trace: TraceLogger | None = None,
        max_firings: int | None = None,
        counter: SerialCounter = SERIALS,
    ) -> None:
        self.program = program
        self.store = Store(ground_only=not program.allows_open, ground_keys=program.ground_keys)
        self.trace = trace or TraceLogger(enabled=False)
        self.router = BuiltinRouter(self.store)
        self.firings = 0
        self._max_firings = max_firings
        self._counter = counter
        self._choices: list[ChoicePoint] = []
        self._plans: dict[tuple[int, int], _Plan] = {}
        self._constraints = self.store._constraints
        self._deref = self.store.bindings.walk if program.allows_open else None

    # ── Public API ────────────────────────────────────────────────────

    def run(self, initial: Iterable[Term]) -> RunResult:
        """Insert and activate ``initial`` constraints left to right until a
        fixpoint (first solution) or until every branch fails."""
        goal = self._initial_goal(initial)
        ok = self._drive((GoalFrame(goal), None), len(self._choices))
        logger.debug(
            "engine_run_finished",
            outcome="success" if ok else "failure",
            firings=self.firings,
            constraints=len(self.store),
            choice_points=len(self._choices),
        )
        return RunResult(success=ok, store=self.store, firings=self.firings, trace=self.trace)

    def solutions(self, initial: Iterable[Term], limit: int | None = None) -> Iterator[Solution]:
        """Enumerate final stores in backtracking order."""
        base = len(self._choices)
        ok = self._drive((GoalFrame(self._initial_goal(initial)), None), base)
        count = 0
        while ok:
            yield Solution(lines=tuple(self.store.dump()), terms=tuple(self.store.terms()),
                           firings=self.firings)
            count += 1
            if limit is not None and count >= limit:
                return
            cont = self._backtrack(base)
            if cont is _FAILED:
                return
            ok = self._drive(cont, base)

    def solve(self, goal: Goal) -> Outcome:
        """Run ``goal`` to completion (first solution)."""
        ok = self._drive((GoalFrame(goal), None), len(self._choices))
        return Outcome.CONTINUE if ok else Outcome.FAIL_BRANCH

    def activate(self, cid: int) -> Outcome:
        """Activate an already inserted constraint."""
        ok = self._drive((ActivationFrame(cid, 0, None), None), len(self._choices))
        return Outcome.CONTINUE if ok else Outcome.FAIL_BRANCH

    def try_rule(self, rule_index: int, position: int, cid: int) -> int:
        """Fire rule ``rule_index`` with ``cid`` at head ``position`` as often
        as it applies; return the number of firings."""
        if not 0 <= rule_index < len(self.program.rules):
            raise EngineError(f"no rule with index {rule_index}")
        before = self.firings
        self._drive((OccurrenceFrame(cid, rule_index, position, None), None), len(self._choices))
        return self.firings - before

    def insert(self, term: Term) -> int:
        """Insert a constraint without activating it."""
        functor, _ = functor_key(term)
        cid = self.store.insert(functor, term_args(term))
        self._trace_insert(cid)
        return cid

    @property
    def choice_points(self) -> int:
        return len(self._choices)

    # ── Driver ────────────────────────────────────────────────────────

    def _drive(self, cont: object, base: int) -> bool:
        step = self._step
        while cont is not None:
            frame, rest = cont
            cont = step(frame, rest)
            if cont is _FAILED:
                cont = self._backtrack(base)
                if cont is _FAILED:
                    return False
        return True

    def _backtrack(self, base: int) -> object:
        choices = self._choices
        while len(choices) > base:
            cp = choices[-1]
            if cp.solutions is not None:
                self._undo(cp.resume_mark)
                if next(cp.solutions, _STOP) is not _STOP:
                    cp.resume_mark = self.store.mark()
                    return cp.cont
                choices.pop()
                self._undo(cp.mark)
                continue
            choices.pop()
            self._undo(cp.mark)
            return (cp.alternative, cp.cont)
        return _FAILED

    def _step(self, frame: object, cont: object) -> object:
        kind = type(frame)
        if kind is ActivationFrame:
            return self._step_activation(frame, cont)
        if kind is GoalFrame:
            return self._step_goal(frame.goal, cont)
        if kind is RetryFrame:
            return self._step_retry(frame, cont)
        if kind is OccurrenceFrame:
            return self._step_occurrence(frame, cont)
        raise EngineError(f"unknown frame {frame!r}")

    def _step_goal(self, goal: Goal, cont: object) -> object:
        kind = type(goal)
        if kind is Call:
            cid = self.store.insert(goal.functor, goal.args)
            self._trace_insert(cid)
            return (ActivationFrame(cid, 0, None), cont)
        if kind is And:
            return (GoalFrame(goal.left), (GoalFrame(goal.right), cont))
        if kind is TrueGoal:
            return cont
        if kind is FailGoal:
            return _FAILED
        if kind is Builtin:
            return self._step_builtin(goal, cont)
        if kind is Or:
            self._push(ChoicePoint(self.store.mark(), cont, GoalFrame(goal.right)))
            return (GoalFrame(goal.left), cont)
        if kind is IfThenElse:
            mark = self.store.mark()
            if next(self.router.solve(goal.cond), _STOP) is not _STOP:
                return (GoalFrame(goal.then), cont)
            self.store.undo_to(mark)
            return (GoalFrame(goal.orelse), cont)
        raise EngineError(f"unknown goal {goal!r}")

    def _step_builtin(self, goal: Builtin, cont: object) -> object:
        mark = self.store.mark()
        solutions = self.router.execute(goal)
        if next(solutions, _STOP) is _STOP:
            return _FAILED
        if not self.router.is_deterministic(goal):
            self._push(ChoicePoint(mark, cont, solutions=solutions, resume_mark=self.store.mark()))
        return cont

    def _step_activation(self, frame: ActivationFrame, cont: object) -> object:
        c = self._constraints.get(frame.cid)
        if c is None or not c.alive:
            return cont
        occurrences = self.program.occurrences_of((c.functor, len(c.args)))
        k, cursor = frame.occurrence, frame.cursor
        while k < len(occurrences):
            plan = self._plan(*occurrences[k])
            mark = self.store.mark()
            found = self._find_instance(plan, c, cursor)
            if found is None:
                k += 1
                cursor = None
                continue
            ids, env, partner_ids = found
            body = self._fire(plan, ids, env)
            if plan.rule.is_removed(plan.position):
                if plan.rule.choice:
                    self._push(ChoicePoint(mark, cont, RetryFrame(c.id, plan.rule_index,
                                                                  plan.position, partner_ids)))
                return self._then(body, cont)
            if plan.removed:
                # consumption can enable earlier occurrences: start over
                resume = ActivationFrame(c.id, 0, None)
            else:
                resume = ActivationFrame(c.id, k, partner_ids)
            return self._then(body, (resume, cont))
        return cont

    def _step_retry(self, frame: RetryFrame, cont: object) -> object:
        c = self._constraints.get(frame.cid)
        if c is None or not c.alive:
            return _FAILED
        plan = self._plan(frame.rule_index, frame.position)
        mark = self.store.mark()
        found = self._find_instance(plan, c, frame.cursor)
        if found is None:
            return _FAILED
        ids, env, partner_ids = found
        body = self._fire(plan, ids, env)
        self._push(ChoicePoint(mark, cont, RetryFrame(c.id, plan.rule_index, plan.position, partner_ids)))
        return self._then(body, cont)

    def _step_occurrence(self, frame: OccurrenceFrame, cont: object) -> object:
        c = self._constraints.get(frame.cid)
        if c is None or not c.alive:
            return cont
        plan = self._plan(frame.rule_index, frame.position)
        found = self._find_instance(plan, c, frame.cursor)
        if found is None:
            return cont
        ids, env, partner_ids = found
        body = self._fire(plan, ids, env)
        if plan.rule.is_removed(plan.position):
            return self._then(body, cont)
        again = OccurrenceFrame(c.id, plan.rule_index, plan.position, partner_ids)
        return self._then(body, (again, cont))

    @staticmethod
    def _then(body: Goal, cont: object) -> object:
        return cont if type(body) is TrueGoal else (GoalFrame(body), cont)

    def _push(self, cp: ChoicePoint) -> None:
        self._choices.append(cp)
        self.trace.choice()

    def _undo(self, mark: int) -> None:
        self.store.undo_to(mark)
        self.trace.undo(mark)

    # ── Rule instances ────────────────────────────────────────────────

    def _find_instance(self, plan: _Plan, c: Constraint, cursor: tuple | None):
        """First applicable instance after ``cursor``: (ids, env, partner ids) or None.

        On success the tell guard's bindings are in place.
        """
        env: dict[int, Term] = {}
        deref = self._deref
        for p, t in zip(plan.active_args, c.args):
            if not match_into(p, t, env, deref):
                return None

        rule = plan.rule
        history = self.store.history
        for partner_ids, env2 in self._partners(plan, 0, env, (c.id,), cursor):
            ids = self._head_ids(plan, c.id, partner_ids)
            if plan.propagation and history.seen(plan.rule_index, ids):
                continue
            if rule.guard_ask and not self._ask(rule, env2):
                continue
            for v in plan.variables:
                if v.serial not in env2:
                    env2[v.serial] = self._counter.fresh(v.name)
            if rule.guard_tell:
                mark = self.store.mark()
                if not self._tell(rule, env2):
                    self.store.undo_to(mark)
                    continue
            return ids, env2, partner_ids
        return None

    def _partners(self, plan: _Plan, level: int, env: dict, used: tuple, resume: tuple | None):
        if level == len(plan.partners):
            yield (), env
            return
        functor, arity = plan.partner_keys[level]
        bound = []
        for position, pattern in plan.index_args[level]:
            value = self._ground_value(pattern, env)
            if value is not None:
                bound.append((position, value))
        ids = self.store.candidates(functor, arity, bound)

        last = level == len(plan.partners) - 1
        start = 0
        if resume is not None:
            start = bisect_right(ids, resume[level]) if last else bisect_left(ids, resume[level])

        pattern_args = plan.partner_args[level]
        constraints = self._constraints
        deref = self._deref
        for i in range(start, len(ids)):
            cid = ids[i]
            if cid in used:
                continue
            c = constraints[cid]
            env2 = dict(env)
            matched = True
            for p, t in zip(pattern_args, c.args):
                if not match_into(p, t, env2, deref):
                    matched = False
                    break
            if not matched:
                continue
            deeper = resume if resume is not None and not last and cid == resume[level] else None
            for rest, env3 in self._partners(plan, level + 1, env2, used + (cid,), deeper):
                yield (cid,) + rest, env3

    def _ground_value(self, pattern: Term, env: dict) -> Term | None:
        if isinstance(pattern, Var):
            value = env.get(pattern.serial)
            if value is None:
                return None
        elif isinstance(pattern, Compound):
            value = resolve(pattern, env)
        else:
            return pattern
        if self._deref is not None:
            value = self.store.bindings.resolve(value)
        if isinstance(value, (Var, Compound)) and not is_ground(value):
            return None
        return value

    @staticmethod
    def _head_ids(plan: _Plan, active: int, partner_ids: tuple) -> tuple:
        ids = [0] * (len(partner_ids) + 1)
        ids[plan.position] = active
        for position, cid in zip(plan.partners, partner_ids):
            ids[position] = cid
        return tuple(ids)

    def _ask(self, rule: Rule, env: dict) -> bool:
        for g in rule.guard_ask:
            if not self.router.ask(map_goal(g, lambda t: resolve(t, env))):
                return False
        return True

    def _tell(self, rule: Rule, env: dict) -> bool:
        for g in rule.guard_tell:
            if next(self.router.solve(map_goal(g, lambda t: resolve(t, env))), _STOP) is _STOP:
                return False
        return True

    def _fire(self, plan: _Plan, ids: tuple, env: dict) -> Goal:
        rule = plan.rule
        if plan.propagation:
            self.store.history.record(plan.rule_index, ids)
        if self.trace.enabled:
            self.trace.fire(rule.name, ids)
        for position in plan.removed:
            self.store.kill(ids[position])
            if self.trace.enabled:
                self.trace.kill(ids[position])
        self.firings += 1
        if self._max_firings is not None and self.firings > self._max_firings:
            raise EngineError(f"firing budget of {self._max_firings} exceeded")
        body = rule.body
        if type(body) is TrueGoal:
            return body
        return map_goal(body, lambda t: resolve(t, env))

    # ── Private Helpers ───────────────────────────────────────────────

    def _plan(self, rule_index: int, position: int) -> _Plan:
        plan = self._plans.get((rule_index, position))
        if plan is None:
            plan = self._plans[(rule_index, position)] = self._make_plan(rule_index, position)
        return plan

    def _make_plan(self, rule_index: int, position: int) -> _Plan:
        rule = self.program.rules[rule_index]
        heads = rule.heads
        if not 0 <= position < len(heads):
            raise EngineError(f"rule '{rule.name}' has no head {position}")
        bound = {v.serial for v in term_vars(heads[position])}
        remaining = [p for p in range(len(heads)) if p != position]
        partners: list[int] = []
        index_args: list[tuple] = []
        while remaining:
            # prefer the head with most arguments already determined
            best = max(remaining, key=lambda p: (_determined(heads[p], bound), -p))
            remaining.remove(best)
            partners.append(best)
            index_args.append(tuple(
                (i, a) for i, a in enumerate(term_args(heads[best]))
                if all(v.serial in bound for v in term_vars(a))
            ))
            bound.update(v.serial for v in term_vars(heads[best]))

        return _Plan(
            rule_index=rule_index,
            rule=rule,
            position=position,
            active_args=term_args(heads[position]),
            partners=tuple(partners),
            partner_keys=tuple(functor_key(heads[p]) for p in partners),
            partner_args=tuple(term_args(heads[p]) for p in partners),
            index_args=tuple(index_args),
            removed=tuple(range(len(rule.kept_heads), len(heads))),
            propagation=not rule.removed_heads,
            variables=tuple(rule.variables()),
        )

    def _initial_goal(self, initial: Iterable[Term]) -> Goal:
        calls: list[Goal] = []
        for term in initial:
            if not isinstance(term, (Compound, Const)):
                raise EngineError(f"initial constraint {term!r} is not callable")
            if not is_ground(term):
                raise EngineError(f"initial constraint {format_term(term)} is not ground")
            functor, _ = functor_key(term)
            calls.append(Call(functor, term_args(term)))
        return conjunction(calls)

    def _trace_insert(self, cid: int) -> None:
        if self.trace.enabled:
            c = self._constraints[cid]
            self.trace.insert(cid, format_term(self.store.bindings.resolve(c.term()),
                                               var_style="serial"))


def _determined(head: Term, bound: set[int]) -> int:
    return sum(1 for a in term_args(head) if all(v.serial in bound for v in term_vars(a)))


def run(program: Program, initial: Iterable[Term], **kwargs) -> RunResult:
    """Run ``program`` on ``initial`` constraints with a fresh engine."""
    return Engine(program, **kwargs).run(initial)
