"""Eavesdropper models applied to qubits in flight, and the semi-honest sender scenario.

For every attacked link, draws happen in transmitted order. Intercept-resend
draws, per qubit, the attack decision, then (random-basis variant) the basis
bit, then the measurement. Bell pairing draws, per guessed pair, the attack
decision then the measurement. The decision draw happens even when the
probability is 1 so that streams do not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quantum import Register, bell_basis, computational_basis, diagonal_basis
from .sequences import ParticleRef

LINKS = ("charlie_to_alice", "charlie_to_bob", "alice_to_bob", "bob_to_alice")
KINDS = (
    "none",
    "intercept_resend_random_basis",
    "intercept_resend_computational",
    "bell_pairing",
    "semi_honest_alice_substitution",
)
PAIRINGS = ("adjacent", "random")

# Short names accepted on the command line.
ALIASES = {
    "none": "none",
    "intercept-resend": "intercept_resend_random_basis",
    "intercept-resend-computational": "intercept_resend_computational",
    "bell-pairing": "bell_pairing",
    "semi-honest": "semi_honest_alice_substitution",
}


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class AttackModel:
    kind: str = "none"
    probability: float = 1.0
    pairing: str = "adjacent"
    links: tuple[str, ...] = LINKS

    def __post_init__(self):
        kind = ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise AttackError(f"unknown attack {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not 0 <= self.probability <= 1:
            raise AttackError(f"attack probability must lie in [0, 1], got {self.probability}")
        if self.pairing not in PAIRINGS:
            raise AttackError(f"unknown pairing strategy {self.pairing!r}")
        links = tuple(self.links)
        for link in links:
            if link not in LINKS:
                raise AttackError(f"unknown link {link!r}")
        object.__setattr__(self, "links", links)

    def targets(self, link: str) -> bool:
        return self.kind != "none" and link in self.links

    def to_text(self) -> str:
        if self.kind == "none":
            return "none"
        parts = [f"p={self.probability!r}"]
        if self.kind == "bell_pairing":
            parts.append(f"pairing={self.pairing}")
        if self.links != LINKS:
            parts.append("links=" + "+".join(self.links))
        return f"{self.kind}:" + ",".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "AttackModel":
        kind, _, rest = text.partition(":")
        kwargs = {}
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            if not sep:
                raise AttackError(f"malformed attack parameter {item!r}")
            if key == "p":
                kwargs["probability"] = float(value)
            elif key == "pairing":
                kwargs["pairing"] = value
            elif key == "links":
                kwargs["links"] = tuple(value.split("+"))
            else:
                raise AttackError(f"unknown attack parameter {key!r}")
        return cls(kind, **kwargs)


@dataclass(frozen=True)
class TapPoint:
    link: str
    position: str = "after_decoys"

    def __post_init__(self):
        if self.link not in LINKS:
            raise AttackError(f"unknown link {self.link!r}")
        if self.position != "after_decoys":
            raise AttackError("Eve only sees the transmitted sequence, after decoy insertion")


def _guess_pairs(n: int, strategy: str, rng: np.random.Generator) -> list[tuple[int, int]]:
    if strategy == "adjacent":
        order = list(range(n))
    else:
        order = [int(x) for x in rng.permutation(n)]
    return [(order[i], order[i + 1]) for i in range(0, n - 1, 2)]


def apply_attack(
    model: AttackModel,
    tap: TapPoint,
    register: Register,
    in_flight: Sequence[ParticleRef],
    rng: np.random.Generator,
) -> list[dict]:
    """Let Eve act on ``in_flight`` (transmitted order) in place; returns her records."""
    if model.kind == "semi_honest_alice_substitution":
        raise AttackError("the semi-honest scenario is an internal attack, not a channel tap")
    if not model.targets(tap.link):
        return []
    log = []
    if model.kind.startswith("intercept_resend"):
        for pos, ref in enumerate(in_flight):
            if rng.random() >= model.probability:
                continue
            if model.kind == "intercept_resend_random_basis":
                basis = "zx"[int(rng.integers(2))]
            else:
                basis = "z"
            b = computational_basis(1) if basis == "z" else diagonal_basis()
            label = register.measure(b, [ref], rng)
            log.append({"position": pos, "basis": basis, "outcome": label})
    elif model.kind == "bell_pairing":
        for i, j in _guess_pairs(len(in_flight), model.pairing, rng):
            if rng.random() >= model.probability:
                continue
            label = register.measure(bell_basis(), [in_flight[i], in_flight[j]], rng)
            log.append({"positions": [i, j], "outcome": label})
    return log


def run_semi_honest_scenario(flow: str, n: int = 16, seed: int = 0) -> dict:
    """Can Alice get a message to Bob without Charlie's consent?

    ``hh_style_alice_prepares``: Alice builds the three-party state herself and
    hands Charlie a qubit that is already separable, so Charlie's announcement
    carries nothing Bob needs. ``proposed_charlie_prepares``: Charlie prepares
    and permutes; Bob tries to decode before the disclosure.
    """
    from .protocol import hh_style_session, pre_disclosure_attempt

    if flow == "hh_style_alice_prepares":
        transcript, sent, got = hh_style_session(n, seed)
    elif flow == "proposed_charlie_prepares":
        transcript, sent, got = pre_disclosure_attempt(n, seed)
    else:
        raise AttackError(f"unknown scenario flow {flow!r}")
    symbols = [(sent[i : i + 2], got[i : i + 2]) for i in range(0, len(sent), 2)]
    accuracy = sum(a == b for a, b in symbols) / len(symbols)
    return {
        "control_bypassed": sent == got,
        "accuracy": accuracy,
        "sent": sent,
        "decoded": got,
        "evidence": transcript,
    }
