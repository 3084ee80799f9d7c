"""Dense state-vector simulation of small multi-qubit blocks.

Qubit 0 is the most significant bit of a basis-state index, so ``|q0 q1 ... >``
reads left to right exactly as written in ket notation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import sqrt
from typing import Hashable, Iterable, Sequence

import numpy as np

TOL = 1e-12
DEFAULT_BLOCK_LIMIT = 16
# Largest block a dense state vector can hold in memory here (2^26 amplitudes, 1 GiB).
MAX_BLOCK_QUBITS = 26

# Outcomes below this probability are treated as impossible.
_ZERO_PROB = 1e-13


class QuantumError(ValueError):
    """Invalid quantum object or operation."""


class CapacityError(QuantumError):
    """A block would exceed the configured qubit limit."""


def _as_amplitudes(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_amplitudes(self.amplitudes)
        if self.num_qubits < 1:
            raise QuantumError("a state needs at least one qubit")
        if amps.size != 2**self.num_qubits:
            raise QuantumError(
                f"{amps.size} amplitudes do not describe {self.num_qubits} qubits"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > TOL * max(1, self.num_qubits):
            raise QuantumError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, values, normalize: bool = False) -> "StateVector":
        arr = np.array(values, dtype=complex).reshape(-1)
        n = int(round(np.log2(arr.size))) if arr.size else 0
        if normalize:
            arr = arr / np.linalg.norm(arr)
        return cls(n, arr)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string, e.g. ``basis("01")``."""
        arr = np.zeros(2 ** len(bits), dtype=complex)
        arr[int(bits, 2)] = 1.0
        return cls(len(bits), arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __repr__(self):
        terms = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > 1e-9):
            amp = self.amplitudes[idx]
            terms.append(f"({amp:.4g})|{idx:0{self.num_qubits}b}>")
        return "StateVector(" + " + ".join(terms) + ")"


@dataclass(frozen=True, eq=False)
class Gate:
    arity: int
    matrix: np.ndarray
    name: str = "U"

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        dim = 2**self.arity
        if mat.shape != (dim, dim):
            raise QuantumError(f"gate {self.name} has shape {mat.shape}, expected {(dim, dim)}")
        if not np.allclose(mat.conj().T @ mat, np.eye(dim), atol=TOL, rtol=0):
            raise QuantumError(f"gate {self.name} is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


_S = 1 / sqrt(2)

I = Gate(1, np.eye(2), "I")
X = Gate(1, [[0, 1], [1, 0]], "X")
# Literal iY with the phase the encoding tables rely on: iY|0> = -|1>, iY|1> = |0>.
IY = Gate(1, [[0, 1], [-1, 0]], "iY")
Z = Gate(1, [[1, 0], [0, -1]], "Z")
H = Gate(1, np.array([[1, 1], [1, -1]]) * _S, "H")
CNOT = Gate(2, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], "CNOT")

PAULIS = {"I": I, "X": X, "iY": IY, "Z": Z}


class MeasurementBasis:
    """Complete orthonormal basis of a subsystem with outcome labels.

    The computational basis is kept implicit (no stored vectors) so it can be
    used on wide blocks.
    """

    def __init__(self, name: str, labels, vectors, num_qubits: int | None = None):
        self.name = name
        if vectors is None:
            if name != "computational" or num_qubits is None:
                raise QuantumError("only the computational basis may omit its vectors")
            self.num_qubits = num_qubits
            self.labels = None
            self.vectors = None
            return
        vecs = np.array(vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise QuantumError("basis must contain exactly dim vectors of length dim")
        labels = tuple(labels)
        if len(labels) != vecs.shape[0] or len(set(labels)) != len(labels):
            raise QuantumError("basis labels must be unique, one per vector")
        if not np.allclose(vecs.conj() @ vecs.T, np.eye(vecs.shape[0]), atol=TOL, rtol=0):
            raise QuantumError(f"basis {name!r} is not orthonormal")
        vecs.setflags(write=False)
        self.num_qubits = int(round(np.log2(vecs.shape[0])))
        self.labels = labels
        self.vectors = vecs

    def __repr__(self):
        return f"MeasurementBasis({self.name!r}, {self.num_qubits} qubits)"

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def label(self, index: int) -> str:
        if self.labels is None:
            return format(index, f"0{self.num_qubits}b")
        return self.labels[index]

    def index(self, label: str) -> int:
        if self.labels is None:
            if len(label) != self.num_qubits:
                raise KeyError(label)
            return int(label, 2)
        return self.labels.index(label)

    def vector_array(self, index: int) -> np.ndarray:
        if self.vectors is None:
            vec = np.zeros(self.dim, dtype=complex)
            vec[index] = 1.0
            return vec
        return self.vectors[index]

    def vector(self, label: str) -> StateVector:
        return StateVector(self.num_qubits, self.vector_array(self.index(label)))

    @classmethod
    def custom(cls, states: Sequence[StateVector], labels: Sequence[str], name="custom"):
        return cls(name, tuple(labels), np.array([s.amplitudes for s in states]))


@lru_cache(maxsize=None)
def computational_basis(num_qubits: int = 1) -> MeasurementBasis:
    return MeasurementBasis("computational", None, None, num_qubits)


@lru_cache(maxsize=None)
def diagonal_basis() -> MeasurementBasis:
    return MeasurementBasis("diagonal", ("+", "-"), np.array([[1, 1], [1, -1]]) * _S)


# Non-standard labels, kept for compatibility with the protocol tables:
# psi+- = (|00> +- |11>)/sqrt2, phi+- = (|01> +- |10>)/sqrt2.
BELL_LABELS = ("psi+", "phi+", "phi-", "psi-")
_BELL_VECTORS = {
    "psi+": np.array([1, 0, 0, 1]) * _S,
    "psi-": np.array([1, 0, 0, -1]) * _S,
    "phi+": np.array([0, 1, 1, 0]) * _S,
    "phi-": np.array([0, 1, -1, 0]) * _S,
}


@lru_cache(maxsize=None)
def bell_basis() -> MeasurementBasis:
    return MeasurementBasis("bell", BELL_LABELS, np.array([_BELL_VECTORS[k] for k in BELL_LABELS]))


def complete_basis(vectors: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal rows to a full orthonormal basis of C^dim."""
    vecs = np.array(vectors, dtype=complex).reshape(-1, dim)
    if vecs.shape[0] == dim:
        return vecs
    # The null space of the given rows supplies the missing directions.
    _, _, vh = np.linalg.svd(vecs, full_matrices=True)
    extra = vh[vecs.shape[0]:].conj()
    return np.vstack([vecs, extra])


# --------------------------------------------------------------------------- ops


def tensor(a: StateVector, b: StateVector, limit: int = DEFAULT_BLOCK_LIMIT) -> StateVector:
    n = a.num_qubits + b.num_qubits
    if n > limit:
        raise CapacityError(f"{n} qubits exceed the block limit of {limit}")
    return StateVector(n, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Iterable[StateVector], limit: int = DEFAULT_BLOCK_LIMIT) -> StateVector:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s, limit)
    return out


def _check_targets(n: int, targets: Sequence[int], expected: int | None = None):
    if len(set(targets)) != len(targets):
        raise QuantumError(f"repeated target qubits {tuple(targets)}")
    for t in targets:
        if not 0 <= t < n:
            raise QuantumError(f"qubit index {t} out of range for {n} qubits")
    if expected is not None and len(targets) != expected:
        raise QuantumError(f"gate acts on {expected} qubits, got {len(targets)} targets")


def _front(amps: np.ndarray, n: int, targets: Sequence[int]) -> np.ndarray:
    """View with target axes first (in the given order), shaped (2^k, 2^(n-k))."""
    rest = [q for q in range(n) if q not in targets]
    psi = amps.reshape([2] * n).transpose(list(targets) + rest)
    return psi.reshape(2 ** len(targets), -1)


def _back(mat: np.ndarray, n: int, targets: Sequence[int]) -> np.ndarray:
    rest = [q for q in range(n) if q not in targets]
    order = list(targets) + rest
    psi = mat.reshape([2] * n).transpose(np.argsort(order))
    return psi.reshape(-1)


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    n = state.num_qubits
    _check_targets(n, targets, gate.arity)
    mat = gate.matrix @ _front(state.amplitudes, n, targets)
    out = _back(mat, n, targets)
    # Re-normalize away round-off accumulated over long gate sequences.
    out = out / np.linalg.norm(out)
    return StateVector(n, out)


@dataclass(frozen=True)
class Outcome:
    probability: float
    post_state: StateVector


@dataclass(frozen=True)
class OutcomeDistribution:
    entries: dict[str, Outcome] = field(default_factory=dict)

    def probabilities(self) -> dict[str, float]:
        return {k: v.probability for k, v in self.entries.items()}

    def __getitem__(self, label: str) -> Outcome:
        return self.entries[label]

    def __contains__(self, label: str) -> bool:
        return label in self.entries


def _projections(state: StateVector, basis: MeasurementBasis, targets: Sequence[int]):
    n = state.num_qubits
    _check_targets(n, targets, basis.num_qubits)
    front = _front(state.amplitudes, n, targets)
    if basis.vectors is None:
        rests = front
    else:
        rests = basis.vectors.conj() @ front
    probs = np.clip(np.sum(np.abs(rests) ** 2, axis=1), 0.0, 1.0)
    return rests, probs


def _post_state(state, basis, targets, index, rest) -> StateVector:
    n = state.num_qubits
    rest = rest / np.linalg.norm(rest)
    vec = basis.vector_array(index)
    return StateVector(n, _back(np.outer(vec, rest), n, targets))


def measure_enumerate(
    state: StateVector, basis: MeasurementBasis, targets: Sequence[int]
) -> OutcomeDistribution:
    rests, probs = _projections(state, basis, targets)
    entries = {}
    for idx in np.flatnonzero(probs > _ZERO_PROB):
        entries[basis.label(idx)] = Outcome(
            float(probs[idx]), _post_state(state, basis, targets, idx, rests[idx])
        )
    return OutcomeDistribution(entries)


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index with the given weights using exactly one uniform draw."""
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, u, side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] <= _ZERO_PROB:  # guard against landing on a zero-width bin
        idx -= 1
    return idx


def measure_sampled(
    state: StateVector,
    basis: MeasurementBasis,
    targets: Sequence[int],
    rng: np.random.Generator,
) -> tuple[str, StateVector]:
    rests, probs = _projections(state, basis, targets)
    idx = sample_index(probs, rng)
    return basis.label(idx), _post_state(state, basis, targets, idx, rests[idx])


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise QuantumError(f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


# ---------------------------------------------------------------------- register


class Register:
    """Set of independent blocks holding keyed qubits.

    Blocks are merged on demand when an operation spans several of them, and a
    projective measurement splits the measured qubits back out (a rank-one
    projection leaves them in a product with everything else).
    """

    def __init__(self, limit: int = DEFAULT_BLOCK_LIMIT):
        self.limit = limit
        self._blocks: dict[int, tuple[list[Hashable], StateVector]] = {}
        self._where: dict[Hashable, int] = {}
        self._next = 0

    def __contains__(self, key) -> bool:
        return key in self._where

    def __len__(self) -> int:
        return len(self._where)

    def add(self, keys: Sequence[Hashable], state: StateVector) -> None:
        if len(keys) != state.num_qubits:
            raise QuantumError("one key per qubit is required")
        if state.num_qubits > self.limit:
            raise CapacityError(f"{state.num_qubits} qubits exceed the block limit of {self.limit}")
        for k in keys:
            if k in self._where:
                raise QuantumError(f"qubit {k!r} already registered")
        bid = self._next
        self._next += 1
        self._blocks[bid] = (list(keys), state)
        for k in keys:
            self._where[k] = bid

    def block_of(self, key) -> tuple[list[Hashable], StateVector]:
        keys, state = self._blocks[self._where[key]]
        return list(keys), state

    def _merge(self, keys: Sequence[Hashable]) -> int:
        try:
            bids = list(dict.fromkeys(self._where[k] for k in keys))
        except KeyError as exc:
            raise QuantumError(f"unknown qubit {exc.args[0]!r}") from None
        if len(bids) == 1:
            return bids[0]
        total = sum(self._blocks[b][1].num_qubits for b in bids)
        if total > self.limit:
            raise CapacityError(f"merging would create a {total}-qubit block (limit {self.limit})")
        merged_keys: list[Hashable] = []
        merged = None
        for b in bids:
            bkeys, bstate = self._blocks.pop(b)
            merged_keys.extend(bkeys)
            merged = bstate if merged is None else tensor(merged, bstate, self.limit)
        bid = bids[0]
        self._blocks[bid] = (merged_keys, merged)
        for k in merged_keys:
            self._where[k] = bid
        return bid

    def state(self, keys: Sequence[Hashable]) -> tuple[list[Hashable], StateVector, list[int]]:
        """Joint block containing ``keys``; returns (block keys, state, target indices)."""
        bid = self._merge(keys)
        bkeys, st = self._blocks[bid]
        return list(bkeys), st, [bkeys.index(k) for k in keys]

    def apply(self, gate: Gate, keys: Sequence[Hashable]) -> None:
        bid = self._merge(keys)
        bkeys, st = self._blocks[bid]
        self._blocks[bid] = (bkeys, apply_gate(st, gate, [bkeys.index(k) for k in keys]))

    def distribution(self, basis: MeasurementBasis, keys: Sequence[Hashable]) -> OutcomeDistribution:
        _, st, targets = self.state(keys)
        return measure_enumerate(st, basis, targets)

    def measure(self, basis: MeasurementBasis, keys: Sequence[Hashable], rng: np.random.Generator) -> str:
        bid = self._merge(keys)
        bkeys, st = self._blocks.pop(bid)
        targets = [bkeys.index(k) for k in keys]
        rests, probs = _projections(st, basis, targets)
        idx = sample_index(probs, rng)
        for k in bkeys:
            del self._where[k]
        self.add(list(keys), StateVector(len(keys), basis.vector_array(idx)))
        rest_keys = [k for k in bkeys if k not in keys]
        if rest_keys:
            rest = rests[idx] / np.linalg.norm(rests[idx])
            self.add(rest_keys, StateVector(len(rest_keys), rest))
        return basis.label(idx)

    def remove(self, keys: Sequence[Hashable]) -> StateVector:
        """Detach ``keys`` if they form a whole block on their own."""
        bid = self._merge(keys)
        bkeys, st = self._blocks[bid]
        if set(bkeys) != set(keys):
            raise QuantumError("qubits are still entangled with others")
        del self._blocks[bid]
        for k in bkeys:
            del self._where[k]
        order = [bkeys.index(k) for k in keys]
        return StateVector(st.num_qubits, _front(st.amplitudes, st.num_qubits, order).reshape(-1))
