"""Session transcript: an ordered log of role actions with their resource costs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# Event kinds whose qubit cost is the entangled resource itself.
RESOURCE_KINDS = frozenset({"prepare"})
# Event kinds whose qubit cost is decoys.
DECOY_KINDS = frozenset({"prepare_decoys"})
# Classical traffic needed for decoding (counted in b); everything else is check traffic.
DECODE_KINDS = frozenset({"disclose_permutation", "disclose_measurement"})


@dataclass(frozen=True)
class Event:
    seq_no: int
    actor: str
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)
    qubit_cost: int = 0
    classical_bit_cost: int = 0

    def __post_init__(self):
        if self.qubit_cost < 0 or self.classical_bit_cost < 0:
            raise ValueError("costs must be non-negative")


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)
    config: Any = None
    adversary: Any = None
    result: dict[str, Any] | None = None
    messages: dict[str, str] | None = None

    def log(self, actor: str, kind: str, payload=None, qubit_cost: int = 0, classical_bit_cost: int = 0) -> Event:
        ev = Event(len(self.events), actor, kind, dict(payload or {}), qubit_cost, classical_bit_cost)
        self.events.append(ev)
        return ev

    def find(self, kind: str, **match) -> list[Event]:
        return [
            e for e in self.events
            if e.kind == kind and all(e.payload.get(k) == v for k, v in match.items())
        ]

    def has(self, kind: str, **match) -> bool:
        return bool(self.find(kind, **match))

    @property
    def complete(self) -> bool:
        return bool(self.events) and self.events[-1].kind == "end"
