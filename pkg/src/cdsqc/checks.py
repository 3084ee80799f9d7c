"""Decoy-qubit eavesdropping checks: conjugate coding (BB84) and orthogonal states (GV).

Randomness is drawn from the caller's generator in a fixed order:

* ``prepare_decoys`` (bb84): per decoy, the basis bit then the value bit.
* ``bb84_check``: per decoy in transmitted order, the receiver's basis bit,
  then the measurement draw.
* ``gv_check``: per disclosed pair in order, the measurement draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .quantum import Register, StateVector, bell_basis, computational_basis, diagonal_basis
from .sequences import ParticleRef
from .states import make_bell

MODES = ("bb84", "gv")

_BB84_STATES = {
    ("z", 0): StateVector.basis("0"),
    ("z", 1): StateVector.basis("1"),
    ("x", 0): StateVector(1, np.array([1, 1]) / math.sqrt(2)),
    ("x", 1): StateVector(1, np.array([1, -1]) / math.sqrt(2)),
}
_BASES = {"z": computational_basis(1), "x": diagonal_basis()}
_OUTCOME_BIT = {"0": 0, "1": 1, "+": 0, "-": 1}


class CheckError(ValueError):
    pass


def decoy_count(message_qubits: int, fraction: float, mode: str = "bb84") -> int:
    """Decoys to add so that they make up ``fraction`` of the transmitted qubits.

    GV decoys come in pairs, so an odd count is rounded up.
    """
    if not 0 <= fraction < 1:
        raise CheckError(f"decoy fraction must lie in [0, 1), got {fraction}")
    if fraction == 0 or message_qubits == 0:
        return 0
    d = int(math.floor(message_qubits * fraction / (1 - fraction) + 0.5))
    if mode == "gv" and d % 2:
        d += 1
    return d


@dataclass(frozen=True)
class DecoyBatch:
    """Decoys prepared by one sender for one link.

    ``meta[i]`` is ``(basis, bit)`` for bb84 and the partner index for gv.
    """

    mode: str
    refs: tuple[ParticleRef, ...]
    meta: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise CheckError(f"unknown check mode {self.mode!r}")
        if len(self.refs) != len(self.meta):
            raise CheckError("one metadata record per decoy is required")
        if self.mode == "gv":
            if len(self.refs) % 2:
                raise CheckError("gv decoys come in pairs")
            for i, j in enumerate(self.meta):
                if self.meta[j] != i or i == j:
                    raise CheckError("gv partner map must be an involution without fixed points")

    def __len__(self):
        return len(self.refs)

    def states(self) -> list[StateVector]:
        if self.mode == "bb84":
            return [_BB84_STATES[m] for m in self.meta]
        return [make_bell("psi+") for i, j in enumerate(self.meta) if i < j]

    def pairing(self) -> list[tuple[ParticleRef, ParticleRef]]:
        if self.mode != "gv":
            raise CheckError("only gv batches have a pairing")
        return [(self.refs[i], self.refs[j]) for i, j in enumerate(self.meta) if i < j]

    def load(self, register: Register) -> None:
        """Put the prepared decoy states into the register."""
        if self.mode == "bb84":
            for ref, m in zip(self.refs, self.meta):
                register.add([ref], _BB84_STATES[m])
        else:
            for a, b in self.pairing():
                register.add([a, b], make_bell("psi+"))


def prepare_decoys(mode: str, count: int, rng: np.random.Generator, first_id: int = 0) -> DecoyBatch:
    """Fresh decoys with ids ``first_id ..``; gv pairs occupy consecutive ids."""
    refs = tuple(ParticleRef(first_id + i, 0, "decoy") for i in range(count))
    if mode == "bb84":
        meta = []
        for _ in range(count):
            basis = "zx"[int(rng.integers(2))]
            meta.append((basis, int(rng.integers(2))))
        return DecoyBatch(mode, refs, tuple(meta))
    if mode == "gv":
        if count % 2:
            raise CheckError("gv decoys come in pairs")
        return DecoyBatch(mode, refs, tuple(i ^ 1 for i in range(count)))
    raise CheckError(f"unknown check mode {mode!r}")


@dataclass
class CheckReport:
    mode: str
    compared: int = 0
    mismatches: int = 0
    details: list[dict] = field(default_factory=list)

    @property
    def error_rate(self) -> float:
        return self.mismatches / self.compared if self.compared else 0.0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "compared": self.compared,
            "mismatches": self.mismatches,
            "error_rate": self.error_rate,
        }


def bb84_check(batch: DecoyBatch, register: Register, rng: np.random.Generator) -> CheckReport:
    """Receiver measures every decoy in a random basis; basis-matched ones are compared."""
    if batch.mode != "bb84":
        raise CheckError(f"bb84_check given a {batch.mode} batch")
    report = CheckReport("bb84")
    for ref, (basis, bit) in zip(batch.refs, batch.meta):
        chosen = "zx"[int(rng.integers(2))]
        got = _OUTCOME_BIT[register.measure(_BASES[chosen], [ref], rng)]
        record = {"decoy": str(ref), "sent": f"{basis}{bit}", "basis": chosen, "bit": got}
        if chosen == basis:
            report.compared += 1
            report.mismatches += got != bit
        report.details.append(record)
    return report


def gv_check(
    batch: DecoyBatch,
    register: Register,
    pairing: Sequence[tuple[ParticleRef, ParticleRef]],
    rng: np.random.Generator,
) -> CheckReport:
    """Bell-measure every disclosed partner pair; anything other than psi+ is a mismatch."""
    if batch.mode != "gv":
        raise CheckError(f"gv_check given a {batch.mode} batch")
    flat = [r for pair in pairing for r in pair]
    if len(flat) != len(set(flat)) or set(flat) != set(batch.refs):
        raise CheckError("disclosed pairing is not a perfect matching of the decoys")
    report = CheckReport("gv")
    basis = bell_basis()
    for a, b in pairing:
        label = register.measure(basis, [a, b], rng)
        report.compared += 1
        report.mismatches += label != "psi+"
        report.details.append({"pair": [str(a), str(b)], "outcome": label})
    return report
