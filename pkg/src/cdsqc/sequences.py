"""Particle identities, ordered particle sequences and permutations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class ParticleRef:
    """A physical qubit: slot ``slot`` of block ``block``.

    Message qubits and decoys live in separate block-id namespaces, told apart
    by ``kind``.
    """

    block: int
    slot: int
    kind: str = "message"

    def __str__(self):
        return f"{'m' if self.kind == 'message' else 'd'}{self.block}.{self.slot}"

    @classmethod
    def parse(cls, text: str) -> "ParticleRef":
        kind = {"m": "message", "d": "decoy"}[text[0]]
        block, slot = text[1:].split(".")
        return cls(int(block), int(slot), kind)


class ParticleSequence(Sequence[ParticleRef]):
    """Immutable ordered sequence of distinct particles."""

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[ParticleRef] = ()):
        items = tuple(items)
        if len(set(items)) != len(items):
            raise ValueError("particle sequence contains duplicates")
        self._items = items

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return ParticleSequence(self._items[idx])
        return self._items[idx]

    def __iter__(self) -> Iterator[ParticleRef]:
        return iter(self._items)

    def __eq__(self, other):
        if isinstance(other, ParticleSequence):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __add__(self, other: "ParticleSequence") -> "ParticleSequence":
        return ParticleSequence(self._items + tuple(other))

    def __repr__(self):
        return "ParticleSequence([" + ", ".join(map(str, self._items)) + "])"

    @property
    def items(self) -> tuple[ParticleRef, ...]:
        return self._items

    def without(self, positions: Iterable[int]) -> "ParticleSequence":
        drop = set(positions)
        return ParticleSequence(x for i, x in enumerate(self._items) if i not in drop)

    def chunks(self, size: int) -> list[tuple[ParticleRef, ...]]:
        if size <= 0 or len(self) % size:
            raise ValueError(f"cannot split {len(self)} particles into groups of {size}")
        return [self._items[i : i + size] for i in range(0, len(self), size)]


@dataclass(frozen=True)
class Permutation:
    """Bijection on {0..n-1}; applied to a sequence, item i of the result is item mapping[i]."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(x) for x in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"{mapping} is not a permutation")
        object.__setattr__(self, "mapping", mapping)

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(int(x) for x in rng.permutation(n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def apply(self, seq: Sequence) -> list:
        if len(seq) != self.n:
            raise ValueError(f"permutation on {self.n} items applied to {len(seq)}")
        return [seq[j] for j in self.mapping]

    def then(self, other: "Permutation") -> "Permutation":
        """Permutation equal to applying ``self`` first and ``other`` second."""
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    def mismatches(self, other: "Permutation") -> int:
        return sum(a != b for a, b in zip(self.mapping, other.mapping))
