"""Engine trace: one record per observable engine event.

Records every firing, insertion, kill, choice point and undo in the
order they happen. Each record renders to one trace line:

    fire <rule> ids=(3,5)
    insert 7 sentence(0,3)
    kill 4
    choice
    undo-to 12

Usage:
    trace = TraceLogger(enabled=True)
    engine = Engine(program, trace=trace)
    engine.run(tokenize(["peter", "likes", "mary"]))
    print("\\n".join(trace.lines()))
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import TextIO

import structlog

logger = structlog.get_logger(__name__)


@dataclass
class FireEvent:
    """A rule firing with the ids of its heads in head order."""

    rule: str
    ids: tuple

    def to_line(self) -> str:
        return f"fire {self.rule} ids=({','.join(str(i) for i in self.ids)})"

    def to_dict(self) -> dict:
        return {"event": "fire", "rule": self.rule, "ids": list(self.ids)}


@dataclass
class InsertEvent:
    cid: int
    constraint: str

    def to_line(self) -> str:
        return f"insert {self.cid} {self.constraint}"

    def to_dict(self) -> dict:
        return {"event": "insert", "id": self.cid, "constraint": self.constraint}


@dataclass
class KillEvent:
    cid: int

    def to_line(self) -> str:
        return f"kill {self.cid}"

    def to_dict(self) -> dict:
        return {"event": "kill", "id": self.cid}


@dataclass
class ChoiceEvent:
    def to_line(self) -> str:
        return "choice"

    def to_dict(self) -> dict:
        return {"event": "choice"}


@dataclass
class UndoEvent:
    mark: int

    def to_line(self) -> str:
        return f"undo-to {self.mark}"

    def to_dict(self) -> dict:
        return {"event": "undo-to", "mark": self.mark}


TraceEvent = FireEvent | InsertEvent | KillEvent | ChoiceEvent | UndoEvent


class TraceLogger:
    """Collects engine events in memory when enabled.

    A disabled logger costs one attribute check per event; the engine
    checks ``enabled`` before formatting constraint text.

    Args:
        enabled: Record events.
        stream: Optional text stream each line is also written to.
    """

    def __init__(self, enabled: bool = False, stream: TextIO | None = None) -> None:
        self.enabled = enabled
        self._stream = stream
        self._events: list[TraceEvent] = []

    # ── Public API ────────────────────────────────────────────────────

    def fire(self, rule: str, ids: tuple) -> None:
        self._record(FireEvent(rule, ids))

    def insert(self, cid: int, constraint: str) -> None:
        self._record(InsertEvent(cid, constraint))

    def kill(self, cid: int) -> None:
        self._record(KillEvent(cid))

    def choice(self) -> None:
        self._record(ChoiceEvent())

    def undo(self, mark: int) -> None:
        self._record(UndoEvent(mark))

    @property
    def events(self) -> list[TraceEvent]:
        return list(self._events)

    def lines(self) -> list[str]:
        return [e.to_line() for e in self._events]

    def insertions(self) -> list[str]:
        """Inserted constraints in insertion order."""
        return [e.constraint for e in self._events if isinstance(e, InsertEvent)]

    def firings(self) -> list[FireEvent]:
        return [e for e in self._events if isinstance(e, FireEvent)]

    def summary(self) -> dict:
        """Aggregate counts by event kind and by fired rule."""
        kinds: Counter = Counter()
        rules: Counter = Counter()
        for e in self._events:
            kinds[type(e).__name__.removesuffix("Event").lower()] += 1
            if isinstance(e, FireEvent):
                rules[e.rule] += 1
        return {"events": dict(kinds), "rules_fired": dict(rules)}

    def clear(self) -> None:
        self._events.clear()

    # ── Private Helpers ───────────────────────────────────────────────

    def _record(self, event: TraceEvent) -> None:
        if not self.enabled:
            return
        self._events.append(event)
        if self._stream is not None:
            try:
                self._stream.write(event.to_line() + "\n")
            except OSError as e:
                logger.error("trace_write_failed", error=str(e))
                self._stream = None
