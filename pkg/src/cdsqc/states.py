"""Entangled resource families, their validators and dense-coding tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import sqrt
from typing import Mapping, Sequence

import numpy as np

from .quantum import (
    BELL_LABELS,
    CNOT,
    DEFAULT_BLOCK_LIMIT,
    H,
    PAULIS,
    TOL,
    CapacityError,
    Gate,
    MeasurementBasis,
    StateVector,
    apply_gate,
    bell_basis,
    complete_basis,
    computational_basis,
    fidelity,
)

FAMILIES = (
    "bell",
    "ghz_like",
    "n_qubit_dense",
    "swap_generic",
    "controlled_n_plus_1",
    "controlled_2n_plus_1",
    "five_qubit_bcst",
)

CONTROLLED = ("controlled_n_plus_1", "controlled_2n_plus_1", "five_qubit_bcst")

_BELL_ALIASES = {
    "ψ+": "psi+", "ψ-": "psi-", "ψ−": "psi-",
    "φ+": "phi+", "φ-": "phi-", "φ−": "phi-",
}

_S = 1 / sqrt(2)
_SINGLE = {
    "0": np.array([1, 0]),
    "1": np.array([0, 1]),
    "+": np.array([_S, _S]),
    "-": np.array([_S, -_S]),
}


class ChannelError(ValueError):
    """Invalid channel specification."""


def make_bell(variant: str = "psi+") -> StateVector:
    """Bell state by name; ``psi+-`` = (|00> +- |11>)/sqrt2, ``phi+-`` = (|01> +- |10>)/sqrt2."""
    variant = _BELL_ALIASES.get(variant, variant)
    if variant not in BELL_LABELS:
        raise ChannelError(f"unknown Bell state {variant!r}")
    return bell_basis().vector(variant)


def resolve_state(value) -> StateVector:
    """Accept a StateVector, a Bell label, or a single-qubit label (0, 1, +, -)."""
    if isinstance(value, StateVector):
        return value
    if isinstance(value, str):
        if value in _SINGLE:
            return StateVector(1, _SINGLE[value])
        return make_bell(value)
    raise ChannelError(f"cannot interpret {value!r} as a state")


def cat_state(num_qubits: int, sign: int = 1) -> StateVector:
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = _S
    amps[-1] = sign * _S
    return StateVector(num_qubits, amps)


# ------------------------------------------------------------------------ specs


@dataclass(frozen=True)
class ChannelSpec:
    """Shared entangled resource distributed per block.

    ``N`` counts the data qubits of one block (the controller qubit of a
    controlled family is extra) and ``p`` is how many of them the encoder holds.
    """

    family: str
    N: int
    p: int
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ChannelError(f"unknown channel family {self.family!r}")

    @property
    def is_controlled(self) -> bool:
        return self.family in CONTROLLED

    @property
    def block_size(self) -> int:
        if self.family == "controlled_n_plus_1":
            return self.N + 1
        if self.family in ("controlled_2n_plus_1", "five_qubit_bcst"):
            return 2 * self.N + 1
        return self.N

    def roles(self) -> tuple[str, ...]:
        """Owner of each slot of a block: A (encoder), B (receiver), C (controller)."""
        N, p = self.N, self.p
        if self.family == "five_qubit_bcst":
            return ("A", "B", "A", "B", "C")
        if self.family == "controlled_2n_plus_1":
            return ("A",) * p + ("B",) * (N - p) + ("B",) * p + ("A",) * (N - p) + ("C",)
        roles = ("A",) * p + ("B",) * (N - p)
        if self.family == "controlled_n_plus_1":
            roles += ("C",)
        return roles

    def __str__(self):
        return format_channel(self)


def bell_channel() -> ChannelSpec:
    return ChannelSpec("bell", 2, 1, {"variant": "psi+"})


def ghz_like_channel(p: int = 2) -> ChannelSpec:
    # Default split: encoder holds 2 of the 3 qubits (smallest p with N/2 <= p < N).
    return ChannelSpec("ghz_like", 3, p, {})


def controlled_channel(psi1="psi+", psi2="phi+", a="0", b="1", sign="+", p: int | None = None) -> ChannelSpec:
    n = resolve_state(psi1).num_qubits
    p = n // 2 if p is None else p
    if 2 * p < n:
        p = (n + 1) // 2
    return ChannelSpec(
        "controlled_n_plus_1", n, p, {"psi1": psi1, "psi2": psi2, "a": a, "b": b, "sign": sign}
    )


def five_qubit_channel(psi1="psi+", psi2="psi+", psi3="phi+", psi4="phi+", a="0", b="1", sign="+") -> ChannelSpec:
    return ChannelSpec(
        "five_qubit_bcst",
        2,
        1,
        {"psi1": psi1, "psi2": psi2, "psi3": psi3, "psi4": psi4, "a": a, "b": b, "sign": sign},
    )


def cat_channel(m: int) -> ChannelSpec:
    if m < 1:
        raise ChannelError("cat channel needs m >= 1")
    return ChannelSpec(
        "controlled_n_plus_1",
        2 * m,
        m,
        {"cat_m": m, "psi1": cat_state(2 * m, 1), "psi2": cat_state(2 * m, -1), "a": "0", "b": "1", "sign": "+"},
    )


def _ghz_basis(m: int) -> list[StateVector]:
    """(|x> +- |~x>)/sqrt2 for x with a leading 0; order puts all '+' states first."""
    out = []
    for sign in (1, -1):
        for x in range(2 ** (m - 1)):
            amps = np.zeros(2**m, dtype=complex)
            amps[x] = _S
            amps[(2**m - 1) ^ x] = sign * _S
            out.append(StateVector(m, amps))
    return out


def swap_channel(s: int = 1, m: int = 2, l: int = 1, e=None, f=None) -> ChannelSpec:
    if e is None and m >= 2 and s <= m:
        e = _ghz_basis(m)[: 2**s]
    if f is None and l >= s:
        f = [StateVector.basis(format(i, f"0{l}b")) for i in range(2**s)]
    return ChannelSpec(
        "swap_generic", m + l, m, {"s": s, "m": m, "l": l, "e": tuple(e or ()), "f": tuple(f or ())}
    )


def as_controlled(spec: ChannelSpec) -> ChannelSpec:
    """View the 3-qubit GHZ-like state as a controlled Bell-branch resource."""
    if spec.is_controlled:
        return spec
    if spec.family == "ghz_like":
        return controlled_channel("psi+", "phi+", "0", "1", "+")
    raise ChannelError(f"{spec.family} is not a controlled resource")


# ---------------------------------------------------------------- text grammar


def format_channel(spec: ChannelSpec) -> str:
    prm = spec.params
    if spec.family == "bell":
        return "bell"
    if spec.family == "ghz_like":
        return "ghz-like" if spec.p == 2 else f"ghz-like:p={spec.p}"
    if "cat_m" in prm:
        return f"cat:m={prm['cat_m']}"
    if spec.family == "swap_generic":
        return f"swap:s={prm['s']},m={prm['m']},l={prm['l']}"
    if spec.is_controlled:
        keys = ["psi1", "psi2"]
        if spec.family != "controlled_n_plus_1":
            keys += ["psi3", "psi4"]
        for k in keys + ["a", "b"]:
            if not isinstance(prm[k], str):
                raise ChannelError("only label-valued controlled specs have a text form")
        body = ",".join(f"{k}={prm[k]}" for k in keys + ["a", "b", "sign"])
        return f"controlled:{body}"
    raise ChannelError(f"{spec.family} has no text form")


def parse_channel(text: str) -> ChannelSpec:
    name, _, rest = text.strip().partition(":")
    kv = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ChannelError(f"malformed channel parameter {item!r} in {text!r}")
            kv[key.strip()] = value.strip()
    try:
        if name == "bell":
            return bell_channel()
        if name == "ghz-like":
            return ghz_like_channel(int(kv.get("p", 2)))
        if name == "cat":
            return cat_channel(int(kv["m"]))
        if name == "swap":
            return swap_channel(int(kv["s"]), int(kv["m"]), int(kv["l"]))
        if name == "controlled":
            sign = kv.get("sign", "+")
            if "psi3" in kv or "psi4" in kv:
                return five_qubit_channel(
                    kv["psi1"], kv["psi2"], kv["psi3"], kv["psi4"], kv.get("a", "0"), kv.get("b", "1"), sign
                )
            return controlled_channel(kv["psi1"], kv["psi2"], kv.get("a", "0"), kv.get("b", "1"), sign)
    except KeyError as exc:
        raise ChannelError(f"channel {text!r} is missing parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ChannelError(f"bad channel {text!r}: {exc}") from None
    raise ChannelError(f"unknown channel {text!r}")


# ------------------------------------------------------------------ validation


@dataclass
class Validation:
    ok: bool
    diagnostics: list[str]

    def __bool__(self):
        return self.ok


def _orthonormal(states: Sequence[StateVector]) -> bool:
    if len({s.num_qubits for s in states}) > 1:
        return False
    mat = np.array([s.amplitudes for s in states])
    return np.allclose(mat.conj() @ mat.T, np.eye(len(states)), atol=TOL, rtol=0)


def _maximally_entangled(state: StateVector) -> bool:
    # Every single-qubit marginal must be I/2.
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n)
    for q in range(n):
        mat = np.moveaxis(psi, q, 0).reshape(2, -1)
        if not np.allclose(mat @ mat.conj().T, np.eye(2) / 2, atol=1e-9):
            return False
    return True


def _same_state(a: StateVector, b: StateVector) -> bool:
    return a.num_qubits == b.num_qubits and fidelity(a, b) > 1 - TOL


def validate_conditions(spec: ChannelSpec) -> Validation:
    diags: list[str] = []
    N, p, prm = spec.N, spec.p, spec.params
    fam = spec.family

    if fam == "bell" and (N, p) != (2, 1):
        diags.append("bell channel must have N=2, p=1")
    if fam in ("ghz_like", "n_qubit_dense") and not (N <= 2 * p and p < N):
        diags.append(f"encoder share must satisfy N/2 <= p < N (N={N}, p={p})")
    if fam == "n_qubit_dense":
        state = prm.get("state")
        if not isinstance(state, StateVector) or state.num_qubits != N:
            diags.append("n_qubit_dense needs an N-qubit 'state' parameter")

    if fam == "swap_generic":
        s, m, l = prm.get("s", 0), prm.get("m", 0), prm.get("l", 0)
        if not (m >= s >= 1 and l >= s):
            diags.append(f"swap state needs m >= s >= 1 and l >= s (s={s}, m={m}, l={l})")
        if m < 2:
            diags.append("e-states must have at least 2 qubits")
        e, f = list(prm.get("e", ())), list(prm.get("f", ()))
        if len(e) != 2**s or len(f) != 2**s:
            diags.append(f"need 2^s = {2**s} e- and f-states, got {len(e)} and {len(f)}")
        if e and (any(x.num_qubits != m for x in e) or not _orthonormal(e)):
            diags.append("e-states must be orthonormal m-qubit states")
        elif e and not all(_maximally_entangled(x) for x in e):
            diags.append("e-states must be maximally entangled")
        if f and (any(x.num_qubits != l for x in f) or not _orthonormal(f)):
            diags.append("f-states must be orthonormal l-qubit states")

    if spec.is_controlled:
        try:
            a, b = resolve_state(prm["a"]), resolve_state(prm["b"])
            if a.num_qubits != 1 or b.num_qubits != 1:
                diags.append("controller states a, b must be single-qubit states")
            elif abs(np.vdot(a.amplitudes, b.amplitudes)) > TOL:
                diags.append("controller states must satisfy <a|b> = 0")
            names = ["psi1", "psi2"] if fam == "controlled_n_plus_1" else ["psi1", "psi2", "psi3", "psi4"]
            psis = {k: resolve_state(prm[k]) for k in names}
        except (KeyError, ChannelError) as exc:
            return Validation(False, diags + [f"bad controlled parameters: {exc}"])
        if prm.get("sign", "+") not in ("+", "-"):
            diags.append("sign must be '+' or '-'")
        if any(s.num_qubits != N for s in psis.values()):
            diags.append(f"branch states must all have N={N} qubits")
        if fam == "controlled_n_plus_1":
            if _same_state(psis["psi1"], psis["psi2"]):
                diags.append("condition psi1 != psi2 violated: controller qubit would be unentangled")
        else:
            if _same_state(psis["psi1"], psis["psi3"]):
                diags.append("condition psi1 != psi3 violated")
            if _same_state(psis["psi2"], psis["psi4"]):
                diags.append("condition psi2 != psi4 violated")
        if fam == "five_qubit_bcst" and (N, p) != (2, 1):
            diags.append("five-qubit family has N=2, p=1")
    return Validation(not diags, diags)


def _require_valid(spec: ChannelSpec):
    check = validate_conditions(spec)
    if not check:
        raise ChannelError("; ".join(check.diagnostics))


# ---------------------------------------------------------------- constructors


def make_controlled_state(spec: ChannelSpec, limit: int = DEFAULT_BLOCK_LIMIT) -> StateVector:
    """(|psi1>|a> +- |psi2>|b>)/sqrt2, or the two-pair form, with the controller qubit last."""
    spec = as_controlled(spec) if spec.family == "ghz_like" else spec
    if not spec.is_controlled:
        raise ChannelError(f"{spec.family} is not a controlled family")
    _require_valid(spec)
    if spec.block_size > limit:
        raise CapacityError(f"{spec.block_size} qubits exceed the block limit of {limit}")
    prm = spec.params
    a, b = resolve_state(prm["a"]), resolve_state(prm["b"])
    sign = 1 if prm.get("sign", "+") == "+" else -1
    if spec.family == "controlled_n_plus_1":
        first = resolve_state(prm["psi1"]).amplitudes
        second = resolve_state(prm["psi2"]).amplitudes
    else:
        first = np.kron(resolve_state(prm["psi1"]).amplitudes, resolve_state(prm["psi2"]).amplitudes)
        second = np.kron(resolve_state(prm["psi3"]).amplitudes, resolve_state(prm["psi4"]).amplitudes)
    amps = (np.kron(first, a.amplitudes) + sign * np.kron(second, b.amplitudes)) * _S
    return StateVector(spec.block_size, amps)


def make_swap_state(spec: ChannelSpec) -> StateVector:
    """Uniform superposition of |e_i>|f_i> over the 2^s paired basis states."""
    if spec.family != "swap_generic":
        raise ChannelError("make_swap_state needs a swap_generic spec")
    _require_valid(spec)
    e, f = spec.params["e"], spec.params["f"]
    amps = sum(np.kron(ei.amplitudes, fi.amplitudes) for ei, fi in zip(e, f))
    return StateVector(spec.N, amps / sqrt(len(e)))


def make_cat_controlled(m: int, limit: int = DEFAULT_BLOCK_LIMIT) -> StateVector:
    """(|Cat+>|0> + |Cat->|1>)/sqrt2 on 2m+1 qubits, Cat+- = (|0..0> +- |1..1>)/sqrt2."""
    if m < 1:
        raise ChannelError("m must be at least 1")
    if 2 * m + 1 > limit:
        raise CapacityError(f"{2 * m + 1} qubits exceed the block limit of {limit}")
    return make_controlled_state(cat_channel(m), limit)


def make_channel_state(spec: ChannelSpec, limit: int = DEFAULT_BLOCK_LIMIT) -> StateVector:
    if spec.family == "bell":
        return make_bell(spec.params.get("variant", "psi+"))
    if spec.family == "ghz_like":
        return make_controlled_state(as_controlled(spec), limit)
    if spec.family == "n_qubit_dense":
        _require_valid(spec)
        return spec.params["state"]
    if spec.family == "swap_generic":
        return make_swap_state(spec)
    return make_controlled_state(spec, limit)


# ----------------------------------------------------------------- dense coding


@dataclass(frozen=True, eq=False)
class DenseCodingTable:
    """Encode map (message -> Pauli names on the encoder slots) and its decoder.

    The receiver optionally runs ``pre_circuit`` on the data slots, then
    measures them in ``basis``; ``decode`` maps the outcome label to a message.
    Slot indices refer to positions inside one block.
    """

    messages: tuple[str, ...]
    encoders: Mapping[str, tuple[str, ...]]
    encoder_slots: tuple[int, ...]
    data_slots: tuple[int, ...]
    basis: MeasurementBasis
    decode: Mapping[str, str]
    pre_circuit: tuple[tuple[Gate, tuple[int, ...]], ...] = ()

    @property
    def capacity(self) -> int:
        return len(self.messages)

    @property
    def bits(self) -> int:
        return len(self.messages[0])

    def encode_state(self, state: StateVector, message: str) -> StateVector:
        """Apply the encoding for ``message`` to a whole block state."""
        for name, slot in zip(self.encoders[message], self.encoder_slots):
            if name != "I":
                state = apply_gate(state, PAULIS[name], [slot])
        return state

    def decode_label(self, label: str) -> str | None:
        return self.decode.get(label)


def _bits(k: int, width: int) -> str:
    return format(k, f"0{width}b") if width else ""


def _cl_table(encoder_slot: int, data_slots, initial: StateVector, local) -> DenseCodingTable:
    """I, X, iY, Z for 00, 01, 10, 11 on one qubit of a Bell pair, Bell-basis decode."""
    basis = bell_basis()
    encoders = {"00": ("I",), "01": ("X",), "10": ("iY",), "11": ("Z",)}
    decode = {}
    for msg, (name,) in encoders.items():
        out = apply_gate(initial, PAULIS[name], [local])
        label = max(basis.labels, key=lambda lb: fidelity(out, basis.vector(lb)))
        decode[label] = msg
    return DenseCodingTable(tuple(encoders), encoders, (encoder_slot,), tuple(data_slots), basis, decode)


def _pp_table(cl: DenseCodingTable) -> DenseCodingTable:
    encoders = {"0": cl.encoders["00"], "1": cl.encoders["01"]}
    decode = {lb: msg[1] for lb, msg in cl.decode.items() if msg in ("00", "01")}
    return DenseCodingTable(("0", "1"), encoders, cl.encoder_slots, cl.data_slots, cl.basis, decode)


def _pauli_search(branches: Sequence[StateVector], encoder_local: Sequence[int]):
    """Greedy search for Pauli products giving mutually orthogonal states in every branch."""
    chosen: list[tuple[tuple[str, ...], list[np.ndarray]]] = []
    for names in itertools.product(("I", "X", "iY", "Z"), repeat=len(encoder_local)):
        outs = []
        for st in branches:
            for name, q in zip(names, encoder_local):
                if name != "I":
                    st = apply_gate(st, PAULIS[name], [q])
            outs.append(st.amplitudes)
        if all(
            abs(np.vdot(prev[k], outs[k])) < 1e-9 for prev_names, prev in chosen for k in range(len(branches))
        ):
            chosen.append((names, outs))
    keep = 2 ** int(np.floor(np.log2(len(chosen))))
    return chosen[:keep]


def _generic_table(branches, branch, encoder_slots, data_slots, encoder_local) -> DenseCodingTable:
    found = _pauli_search(branches, encoder_local)
    width = int(np.log2(len(found)))
    encoders = {_bits(k, width): names for k, (names, _) in enumerate(found)}
    vecs = complete_basis(np.array([outs[branch] for _, outs in found]), branches[branch].dim)
    labels = [f"e{k}" for k in range(vecs.shape[0])]
    basis = MeasurementBasis("dense", labels, vecs)
    decode = {f"e{k}": _bits(k, width) for k in range(len(found))}
    return DenseCodingTable(tuple(encoders), encoders, tuple(encoder_slots), tuple(data_slots), basis, decode)


def _cat_table(m: int, branch: int) -> DenseCodingTable:
    """m+1 bits on a 2m-qubit cat: X-string on the encoder half plus a Z on its first qubit.

    The receiver disentangles with a CNOT fan-out from the first qubit and an H,
    then reads all 2m qubits in the computational basis.
    """
    encoders, decode = {}, {}
    for t in (0, 1):
        for x in range(2**m):
            xbits = _bits(x, m)
            names = []
            for j, bit in enumerate(xbits):
                if j == 0:
                    names.append({(0, "0"): "I", (0, "1"): "X", (1, "0"): "Z", (1, "1"): "iY"}[(t, bit)])
                else:
                    names.append("X" if bit == "1" else "I")
            msg = str(t) + xbits
            encoders[msg] = tuple(names)
            x0 = int(xbits[0])
            sign_bit = t ^ branch
            rest = "".join(str(int(b) ^ x0) for b in xbits[1:])
            decode[str(sign_bit) + rest + str(x0) * m] = msg
    circuit = tuple((CNOT, (0, j)) for j in range(1, 2 * m)) + ((H, (0,)),)
    return DenseCodingTable(
        tuple(sorted(encoders)),
        encoders,
        tuple(range(m)),
        tuple(range(2 * m)),
        computational_basis(2 * m),
        decode,
        circuit,
    )


def _swap_table(spec: ChannelSpec) -> DenseCodingTable:
    """s-bit table: encoder Paulis permute the e-states regularly; receiver reads e and f separately."""
    prm = spec.params
    s, m, l = prm["s"], prm["m"], prm["l"]
    e, f = list(prm["e"]), list(prm["f"])
    emat = np.array([x.amplitudes for x in e])

    def action(names):
        perm = []
        for st in e:
            for q, name in enumerate(names):
                if name != "I":
                    st = apply_gate(st, PAULIS[name], [q])
            overlaps = np.abs(emat.conj() @ st.amplitudes) ** 2
            j = int(np.argmax(overlaps))
            if overlaps[j] < 1 - 1e-9:
                return None
            perm.append(j)
        return perm

    chosen: list[tuple[tuple[str, ...], list[int]]] = []
    for names in itertools.product(("I", "X", "iY", "Z"), repeat=m):
        perm = action(names)
        if perm is None:
            continue
        if all(all(perm[i] != prev[i] for i in range(len(e))) for _, prev in chosen):
            chosen.append((names, perm))
        if len(chosen) == 2**s:
            break
    if len(chosen) < 2**s:
        raise ChannelError("no Pauli encoding permutes the e-states regularly")

    ebasis = complete_basis(emat, 2**m)
    fbasis = complete_basis(np.array([x.amplitudes for x in f]), 2**l)
    labels, vecs = [], []
    for j in range(ebasis.shape[0]):
        for i in range(fbasis.shape[0]):
            labels.append(f"e{j}.f{i}")
            vecs.append(np.kron(ebasis[j], fbasis[i]))
    encoders, decode = {}, {}
    for k, (names, perm) in enumerate(chosen):
        msg = _bits(k, s)
        encoders[msg] = names
        for i in range(len(e)):
            decode[f"e{perm[i]}.f{i}"] = msg
    basis = MeasurementBasis("swap", labels, np.array(vecs))
    return DenseCodingTable(tuple(encoders), encoders, tuple(range(m)), tuple(range(m + l)), basis, decode)


def dense_coding_table(
    spec: ChannelSpec, scheme: str = "cl", branch: int = 0, direction: str = "ab"
) -> DenseCodingTable:
    """Encoding table for a channel family.

    ``scheme`` is ``"cl"`` (full dense coding) or ``"pp"`` (one bit per block,
    only where the data block is a Bell pair). For controlled families ``branch`` selects which branch
    state (0 for the |a> outcome, 1 for |b>) the receiver decodes against; the
    encoders do not depend on it. ``direction`` picks the pair used on the
    two-pair families (``"ab"`` first pair, ``"ba"`` second pair).
    """
    if scheme not in ("cl", "pp"):
        raise ChannelError(f"unknown encoding scheme {scheme!r}")
    table = _dense_table(spec, branch, direction)
    if scheme == "pp":
        if table.basis.name != "bell":
            raise ChannelError("the one-bit scheme needs a Bell-pair data block")
        return _pp_table(table)
    return table


def _dense_table(spec: ChannelSpec, branch: int, direction: str) -> DenseCodingTable:
    fam = spec.family
    if direction not in ("ab", "ba"):
        raise ChannelError(f"unknown direction {direction!r}")
    if fam == "bell":
        enc = 0 if direction == "ab" else 1
        return _cl_table(enc, (0, 1), make_bell(spec.params.get("variant", "psi+")), enc)

    if fam in ("ghz_like", "n_qubit_dense"):
        _require_valid(spec)
        state = make_channel_state(spec)
        enc = tuple(range(spec.p))
        return _generic_table([state], 0, enc, tuple(range(spec.N)), enc)

    if fam == "swap_generic":
        _require_valid(spec)
        return _swap_table(spec)

    if not spec.is_controlled:
        raise ChannelError(f"no dense coding for family {fam}")
    _require_valid(spec)
    if branch not in (0, 1):
        raise ChannelError("branch must be 0 or 1")
    prm = spec.params
    if "cat_m" in prm:
        return _cat_table(prm["cat_m"], branch)

    N, p = spec.N, spec.p
    if fam == "controlled_n_plus_1":
        pair, offset = ("psi1", "psi2"), 0
        enc_local = tuple(range(p))
    elif direction == "ab":
        pair, offset = ("psi1", "psi3"), 0
        enc_local = tuple(range(p))
    elif direction == "ba":
        # The receiver of the first pair encodes on the second one.
        pair, offset = ("psi2", "psi4"), N
        enc_local = (1,) if fam == "five_qubit_bcst" else tuple(range(p))
    else:
        raise ChannelError(f"unknown direction {direction!r}")
    branches = [resolve_state(prm[k]) for k in pair]
    data_slots = tuple(range(offset, offset + N))
    encoder_slots = tuple(offset + q for q in enc_local)
    if N == 2 and p == 1:
        return _cl_table(encoder_slots[0], data_slots, branches[branch], enc_local[0])
    return _generic_table(branches, branch, encoder_slots, data_slots, enc_local)
