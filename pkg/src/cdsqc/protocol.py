"""Controlled deterministic secure communication sessions.

A session runs three roles over FIFO links:

1. Charlie prepares ``n`` blocks of the channel state and splits them into
   per-party sequences. Receiver sequences are secretly permuted when control
   is by permutation of particles; for controlled channels he keeps the last
   qubit of each block instead.
2. Every sequence travels with freshly inserted decoys. After the receiver's
   acknowledgment the sender reveals the decoy positions and the decoys are
   checked. Any error rate above the threshold aborts the attempt.
3. The sender dense-codes the message on her qubits and sends them, again
   with decoys, to the receiver; that link is checked the same way.
4. Charlie discloses the permutation or announces his measurement outcomes.
5. The receiver restores the block order, measures each block and decodes.

All randomness comes from one ``numpy`` generator seeded by the config, drawn
in this order: permutations (one per permuted sequence), then per
transmission the decoy preparation, the insertion positions and the decoy
order, then the adversary, then the checks in transmission order, then
measurements made while decoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .adversary import AttackModel, TapPoint, apply_attack
from .checks import DecoyBatch, CheckReport, bb84_check, decoy_count, gv_check, prepare_decoys
from .quantum import (
    DEFAULT_BLOCK_LIMIT,
    MAX_BLOCK_QUBITS,
    CapacityError,
    MeasurementBasis,
    OutcomeDistribution,
    PAULIS,
    Register,
    StateVector,
    bell_basis,
)
from .sequences import ParticleRef, ParticleSequence, Permutation
from .states import (
    ChannelError,
    ChannelSpec,
    DenseCodingTable,
    as_controlled,
    dense_coding_table,
    format_channel,
    make_bell,
    make_channel_state,
    parse_channel,
    resolve_state,
    validate_conditions,
)
from .transcript import Transcript

PROTOCOLS = ("cdsqc", "cbdsqc", "cdsqc_alt2", "cdsqc_alt3")
SUBPROTOCOLS = ("pp", "cl", "dll", "pp_gv", "cl_gv", "dll_gv")
CHECKS = ("bb84", "gv")

_FAMILIES = {
    "cdsqc": ("bell", "ghz_like", "n_qubit_dense"),
    "cdsqc_alt2": ("swap_generic",),
    "cdsqc_alt3": ("ghz_like", "controlled_n_plus_1"),
    "cbdsqc": ("bell", "five_qubit_bcst", "controlled_2n_plus_1"),
}
_PARTY = {"alice": "A", "bob": "B"}


class ConfigError(ValueError):
    pass


class ProtocolError(RuntimeError):
    """A role operation was invoked out of protocol order."""


class DisclosureMissing(ProtocolError):
    pass


# ---------------------------------------------------------------------- config


@dataclass(frozen=True)
class SessionConfig:
    protocol: str = "cdsqc"
    subprotocol: str = "cl"
    channel: ChannelSpec | str = "bell"
    n: int = 4
    check: str = "bb84"
    decoy_fraction: float = 0.5
    seed: int = 0
    error_threshold: float = 0.0
    max_attempts: int = 1
    block_limit: int = DEFAULT_BLOCK_LIMIT

    def __post_init__(self):
        if isinstance(self.channel, str):
            try:
                object.__setattr__(self, "channel", parse_channel(self.channel))
            except ChannelError as exc:
                raise ConfigError(str(exc)) from None
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.subprotocol not in SUBPROTOCOLS:
            raise ConfigError(f"unknown subprotocol {self.subprotocol!r}")
        if self.check not in CHECKS:
            raise ConfigError(f"unknown check {self.check!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if not 0 <= self.decoy_fraction < 1:
            raise ConfigError("decoy fraction must lie in [0, 1)")
        if not 0 <= self.error_threshold <= 1:
            raise ConfigError("error threshold must lie in [0, 1]")
        if self.max_attempts < 1:
            raise ConfigError("max_attempts must be at least 1")
        if not 1 <= self.block_limit <= MAX_BLOCK_QUBITS:
            raise ConfigError(f"block limit must lie in [1, {MAX_BLOCK_QUBITS}]")
        fam = self.channel.family
        if fam not in _FAMILIES[self.protocol]:
            raise ConfigError(f"channel {format_channel(self.channel)} cannot run {self.protocol}")
        checked = as_controlled(self.channel) if self.protocol == "cdsqc_alt3" else self.channel
        report = validate_conditions(checked)
        if not report:
            raise ConfigError("; ".join(report.diagnostics))
        if checked.block_size > self.block_limit:
            raise ConfigError(
                f"a {checked.block_size}-qubit block exceeds the block limit of {self.block_limit}"
            )

    @property
    def scheme(self) -> str:
        return "pp" if self.subprotocol.startswith("pp") else "cl"

    @property
    def transfer_check(self) -> str:
        return "gv" if self.subprotocol.endswith("_gv") else "bb84"

    @property
    def resource(self) -> ChannelSpec:
        """The per-block channel the engine distributes."""
        return as_controlled(self.channel) if self.protocol == "cdsqc_alt3" else self.channel

    def to_text(self) -> str:
        fields = [
            ("protocol", self.protocol),
            ("subprotocol", self.subprotocol),
            ("channel", format_channel(self.channel)),
            ("n", self.n),
            ("check", self.check),
            ("decoy_fraction", repr(float(self.decoy_fraction))),
            ("error_threshold", repr(float(self.error_threshold))),
            ("seed", self.seed),
            ("max_attempts", self.max_attempts),
            ("block_limit", self.block_limit),
        ]
        return ";".join(f"{k}={v}" for k, v in fields)

    @classmethod
    def from_text(cls, text: str) -> "SessionConfig":
        kwargs = {}
        for item in text.split(";"):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"malformed config field {item!r}")
            kwargs[key] = value
        conv = {"n": int, "seed": int, "max_attempts": int, "block_limit": int,
                "decoy_fraction": float, "error_threshold": float}
        try:
            for key, fn in conv.items():
                if key in kwargs:
                    kwargs[key] = fn(kwargs[key])
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config text: {exc}") from None


# ------------------------------------------------------------------ directions


@dataclass(frozen=True)
class Direction:
    """One message flow: who encodes which slots of which blocks, and how Charlie controls it."""

    name: str
    sender: str
    receiver: str
    blocks: tuple[int, ...]
    tables: tuple[DenseCodingTable, ...]
    control: str  # "permutation" or "measurement"

    @property
    def enc_slots(self) -> tuple[int, ...]:
        return self.tables[0].encoder_slots

    @property
    def recv_slots(self) -> tuple[int, ...]:
        return tuple(s for s in self.tables[0].data_slots if s not in self.enc_slots)

    @property
    def bits(self) -> int:
        return len(self.blocks) * self.tables[0].bits


def plan_directions(config: SessionConfig) -> list[Direction]:
    spec, n, scheme = config.resource, config.n, config.scheme
    try:
        if config.protocol in ("cdsqc", "cdsqc_alt2"):
            return [Direction("ab", "alice", "bob", tuple(range(n)), (dense_coding_table(spec, scheme),), "permutation")]
        if config.protocol == "cdsqc_alt3":
            tables = tuple(dense_coding_table(spec, scheme, branch=b) for b in (0, 1))
            return [Direction("ab", "alice", "bob", tuple(range(n)), tables, "measurement")]
        if spec.family == "bell":
            return [
                Direction("ab", "alice", "bob", tuple(range(n)), (dense_coding_table(spec, scheme, direction="ab"),), "permutation"),
                Direction("ba", "bob", "alice", tuple(range(n, 2 * n)), (dense_coding_table(spec, scheme, direction="ba"),), "permutation"),
            ]
        out = []
        for name, snd, rcv in (("ab", "alice", "bob"), ("ba", "bob", "alice")):
            tables = tuple(dense_coding_table(spec, scheme, branch=b, direction=name) for b in (0, 1))
            out.append(Direction(name, snd, rcv, tuple(range(n)), tables, "measurement"))
        return out
    except ChannelError as exc:
        raise ConfigError(str(exc)) from None


def block_count(config: SessionConfig) -> int:
    return 2 * config.n if config.protocol == "cbdsqc" and config.resource.family == "bell" else config.n


def controller_slot(config: SessionConfig) -> int | None:
    spec = config.resource
    return spec.block_size - 1 if spec.is_controlled else None


# ----------------------------------------------------------- role operations


def charlie_prepare(config: SessionConfig, rng: np.random.Generator | None = None):
    """Blocks of the channel state plus Alice's and Bob's slot sequences, in block order.

    The generator is accepted for interface symmetry; preparation itself is deterministic.
    """
    spec = config.resource
    try:
        state = make_channel_state(spec, config.block_limit)
    except CapacityError as exc:
        raise ConfigError(str(exc)) from None
    nblocks = block_count(config)
    blocks = [state] * nblocks
    held = {"alice": [], "bob": []}
    for d in plan_directions(config):
        for party, slots in ((d.sender, d.enc_slots), (d.receiver, d.recv_slots)):
            held[party].extend(ParticleRef(b, s) for b in d.blocks for s in slots)
    return blocks, ParticleSequence(held["alice"]), ParticleSequence(held["bob"])


def charlie_permute(seq: ParticleSequence, pi: Permutation) -> ParticleSequence:
    if pi.n != len(seq):
        raise ValueError(f"permutation on {pi.n} items applied to a sequence of {len(seq)}")
    return ParticleSequence(pi.apply(seq.items))


def insert_decoys(
    seq: ParticleSequence, decoys: Sequence[ParticleRef], rng: np.random.Generator
) -> tuple[ParticleSequence, list[int]]:
    """Interleave decoys at uniformly random positions; returns the positions (sorted)."""
    d = len(decoys)
    if d == 0:
        return ParticleSequence(seq), []
    total = len(seq) + d
    positions = sorted(int(x) for x in rng.choice(total, size=d, replace=False))
    order = [decoys[int(i)] for i in rng.permutation(d)]
    out, it_msg, it_dec = [], iter(seq), iter(order)
    pos_set = set(positions)
    for i in range(total):
        out.append(next(it_dec) if i in pos_set else next(it_msg))
    return ParticleSequence(out), positions


def alice_encode(
    message: str, table: DenseCodingTable, register: Register, qubits: Sequence[ParticleRef]
) -> ParticleSequence:
    """Apply the table's Paulis block by block; ``qubits`` are the sender's encoder qubits in block order."""
    width = len(table.encoder_slots)
    groups = ParticleSequence(qubits).chunks(width)
    if len(message) != len(groups) * table.bits or set(message) - {"0", "1"}:
        raise ValueError(
            f"message must be {len(groups) * table.bits} bits for {len(groups)} blocks, got {message!r}"
        )
    for k, group in enumerate(groups):
        chunk = message[k * table.bits : (k + 1) * table.bits]
        for name, ref in zip(table.encoders[chunk], group):
            if name != "I":
                register.apply(PAULIS[name], [ref])
    return ParticleSequence(qubits)


@dataclass(frozen=True)
class Disclosure:
    """What Charlie reveals: permutations per direction, or his per-block outcomes."""

    permutations: Mapping[str, Permutation] = field(default_factory=dict)
    outcomes: tuple[str, ...] | None = None


@dataclass
class Transmission:
    link: str
    label: str
    sender: str
    receiver: str
    sent: ParticleSequence
    positions: list[int]
    batch: DecoyBatch
    report: CheckReport | None = None

    @property
    def message_part(self) -> ParticleSequence:
        return self.sent.without(self.positions)


@dataclass
class SessionResult:
    delivered: dict[str, str] | None
    aborted: bool
    attempts: int
    checks: list[dict]

    def to_dict(self) -> dict:
        return {
            "delivered": self.delivered,
            "aborted": self.aborted,
            "attempts": self.attempts,
            "checks": self.checks,
        }


# --------------------------------------------------------------------- session


class Session:
    """One attempt of the protocol, driven phase by phase.

    ``run_session`` strings the phases together; tests drive them directly to
    probe what a party can learn between phases.
    """

    def __init__(
        self,
        config: SessionConfig,
        messages: Mapping[str, str],
        adversary: AttackModel | None = None,
        rng: np.random.Generator | None = None,
        transcript: Transcript | None = None,
        attempt: int = 1,
    ):
        self.config = config
        self.adversary = adversary or AttackModel()
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.transcript = transcript if transcript is not None else Transcript()
        self.attempt = attempt
        self.directions = plan_directions(config)
        self.messages = dict(messages)
        for d in self.directions:
            msg = self.messages.get(d.name)
            if msg is None or len(msg) != d.bits or set(msg) - {"0", "1"}:
                raise ConfigError(f"direction {d.name} needs a {d.bits}-bit message, got {msg!r}")
        self.register = Register(config.block_limit)
        self.phase = "new"
        self.permutations: dict[str, Permutation] = {}
        self.holdings: dict[str, ParticleSequence] = {}
        self.transfers: dict[str, ParticleSequence] = {}
        self.checks: list[Transmission] = []
        self.controller: list[ParticleRef] = []
        self._next_decoy = 0
        self._disclosed: Disclosure | None = None

    # -- plumbing

    def log(self, actor, kind, payload=None, qubit_cost=0, classical_bit_cost=0):
        payload = dict(payload or {})
        payload["attempt"] = self.attempt
        return self.transcript.log(actor, kind, payload, qubit_cost, classical_bit_cost)

    def _require(self, phase: str, action: str):
        if self.phase != phase:
            raise ProtocolError(f"{action} needs phase {phase!r}, session is in {self.phase!r}")

    def _transmit(self, sender: str, receiver: str, label: str, seq: ParticleSequence, mode: str) -> Transmission:
        link = f"{sender}_to_{receiver}"
        d = decoy_count(len(seq), self.config.decoy_fraction, mode)
        batch = prepare_decoys(mode, d, self.rng, self._next_decoy)
        self._next_decoy += d
        batch.load(self.register)
        if d:
            self.log(sender, "prepare_decoys", {"link": link, "sequence": label, "mode": mode, "count": d}, qubit_cost=d)
        sent, positions = insert_decoys(seq, batch.refs, self.rng)
        self.log(sender, "send", {"link": link, "sequence": label, "length": len(sent)})
        if self.adversary.targets(link):
            records = apply_attack(self.adversary, TapPoint(link), self.register, sent.items, self.rng)
            self.log("eve", "attack", {"link": link, "sequence": label, "kind": self.adversary.kind, "records": records})
        tx = Transmission(link, label, sender, receiver, sent, positions, batch)
        self.checks.append(tx)
        return tx

    def _check(self, tx: Transmission) -> float:
        """Acknowledge, reveal decoy positions, run the subroutine, strip the decoys."""
        self.log(tx.receiver, "ack", {"link": tx.link, "sequence": tx.label})
        if not len(tx.batch):
            tx.report = CheckReport(tx.batch.mode)
            return 0.0
        width = max(1, math.ceil(math.log2(len(tx.sent))))
        self.log(
            tx.sender,
            "disclose_decoy_positions",
            {"link": tx.link, "sequence": tx.label, "positions": tx.positions},
            classical_bit_cost=len(tx.positions) * width,
        )
        if tx.batch.mode == "bb84":
            report = bb84_check(tx.batch, self.register, self.rng)
            cost = 2 * len(tx.batch) + report.compared
        else:
            if not self.transcript.has("ack", link=tx.link, sequence=tx.label, attempt=self.attempt):
                raise ProtocolError("pairing disclosed before acknowledgment")
            where = {ref: i for i, ref in enumerate(tx.sent)}
            pairing = tx.batch.pairing()
            self.log(
                tx.sender,
                "disclose_pairing",
                {"link": tx.link, "sequence": tx.label, "pairs": [[where[a], where[b]] for a, b in pairing]},
                classical_bit_cost=len(pairing) * 2 * width,
            )
            report = gv_check(tx.batch, self.register, pairing, self.rng)
            cost = len(pairing)
        tx.report = report
        self.log(
            tx.receiver,
            "check_result",
            {"link": tx.link, "sequence": tx.label, **report.to_dict()},
            classical_bit_cost=cost,
        )
        groups = tx.batch.pairing() if tx.batch.mode == "gv" else [[ref] for ref in tx.batch.refs]
        for group in groups:
            self.register.remove(list(group))
        return report.error_rate

    def _passed(self, txs: Sequence[Transmission]) -> bool:
        return all(tx.report.error_rate <= self.config.error_threshold for tx in txs)

    # -- phases

    def distribute(self) -> bool:
        """Charlie prepares, permutes and sends; the Charlie legs are checked. False means abort."""
        self._require("new", "distribution")
        cfg = self.config
        spec = cfg.resource
        blocks, _, _ = charlie_prepare(cfg, self.rng)
        ctrl = controller_slot(cfg)
        for b, state in enumerate(blocks):
            self.register.add([ParticleRef(b, s) for s in range(spec.block_size)], state)
            if ctrl is not None:
                self.controller.append(ParticleRef(b, ctrl))
        self.log(
            "charlie",
            "prepare",
            {"channel": format_channel(cfg.channel), "blocks": len(blocks), "block_size": spec.block_size},
            qubit_cost=len(blocks) * spec.block_size,
        )

        outgoing = {"alice": [], "bob": []}
        count = {"alice": 0, "bob": 0}
        for d in self.directions:
            for party, slots, role in ((d.sender, d.enc_slots, "enc"), (d.receiver, d.recv_slots, "recv")):
                count[party] += 1
                seq = ParticleSequence(ParticleRef(b, s) for b in d.blocks for s in slots)
                label = f"P_{_PARTY[party]}"
                if len(self.directions) > 1:
                    label += "1" if d.name == "ab" else "2"
                if role == "recv" and d.control == "permutation":
                    pi = Permutation.random(len(seq), self.rng)
                    self.permutations[d.name] = pi
                    seq = charlie_permute(seq, pi)
                    label += "'"
                    self.log("charlie", "permute", {"sequence": label, "length": len(seq)})
                outgoing[party].append((d.name, role, label, seq))

        pending = []
        for party in ("alice", "bob"):
            for dname, role, label, seq in outgoing[party]:
                tx = self._transmit("charlie", party, label, seq, cfg.check)
                pending.append((dname, role, tx))
        for _, _, tx in pending:
            self._check(tx)
        for dname, role, tx in pending:
            self.holdings[f"{dname}:{role}"] = tx.message_part
        ok = self._passed([tx for _, _, tx in pending])
        self.phase = "distributed" if ok else "aborted"
        return ok

    def transfer(self) -> bool:
        """Senders encode and transmit; the transfer links are checked. False means abort."""
        self._require("distributed", "encoding")
        pending = []
        for d in self.directions:
            qubits = self.holdings[f"{d.name}:enc"]
            alice_encode(self.messages[d.name], d.tables[0], self.register, qubits)
            self.log(d.sender, "encode", {"direction": d.name, "subprotocol": self.config.subprotocol,
                                          "blocks": len(d.blocks), "bits": d.bits})
            label = f"{d.sender}:{d.name}"
            pending.append((d, self._transmit(d.sender, d.receiver, label, qubits, self.config.transfer_check)))
        for _, tx in pending:
            self._check(tx)
        for d, tx in pending:
            self.transfers[d.name] = tx.message_part
        ok = self._passed([tx for _, tx in pending])
        self.phase = "transferred" if ok else "aborted"
        return ok

    def disclose(self) -> Disclosure:
        """Charlie's release of control."""
        self._require("transferred", "disclosure")
        perms, outcomes = {}, None
        for d in self.directions:
            if d.control == "permutation":
                pi = self.permutations[d.name]
                perms[d.name] = pi
                self.log(
                    "charlie",
                    "disclose_permutation",
                    {"direction": d.name, "mapping": list(pi.mapping),
                     "strict_bits": math.ceil(math.log2(math.factorial(pi.n))) if pi.n > 1 else 0},
                    classical_bit_cost=pi.n,
                )
        if self.controller:
            outcomes = tuple(self.register.measure(self._controller_basis(), [ref], self.rng) for ref in self.controller)
            self.log("charlie", "disclose_measurement", {"outcomes": list(outcomes)}, classical_bit_cost=len(outcomes))
        self._disclosed = Disclosure(perms, outcomes)
        self.phase = "disclosed"
        return self._disclosed

    def _controller_basis(self) -> MeasurementBasis:
        prm = self.config.resource.params
        return MeasurementBasis.custom([resolve_state(prm["a"]), resolve_state(prm["b"])], ["a", "b"], "controller")

    def decode(self, disclosure: Disclosure | None, direction: str = "ab") -> str:
        """Receiver's decoding; refuses to run without Charlie's disclosure."""
        if disclosure is None or self._disclosed is None:
            raise DisclosureMissing("the receiver cannot decode before Charlie's disclosure")
        d = self._direction(direction)
        perm = disclosure.permutations.get(d.name) if d.control == "permutation" else None
        branches = None
        if d.control == "measurement":
            if not disclosure.outcomes:
                raise DisclosureMissing("controller outcomes missing")
            branches = [0 if disclosure.outcomes[b] == "a" else 1 for b in d.blocks]
        elif perm is None:
            raise DisclosureMissing(f"no permutation disclosed for direction {d.name}")
        got = self._decode(d, perm, branches)
        self.log(d.receiver, "decode", {"direction": d.name, "message": got})
        return got

    def decode_with_guess(self, direction: str, guess: Permutation | None = None, branch: int = 0) -> str:
        """Decoding attempt with a guessed order (and branch) instead of a disclosure."""
        if self.phase not in ("transferred", "disclosed"):
            raise ProtocolError("nothing to decode yet")
        d = self._direction(direction)
        got = self._decode(d, guess if d.control == "permutation" else None, [branch] * len(d.blocks))
        self.log(d.receiver, "guess_decode", {"direction": d.name, "message": got})
        return got

    def pairing_distribution(self, direction: str, guess: Permutation, k: int) -> OutcomeDistribution:
        """Exact outcome distribution of the k-th block measurement under a guessed order."""
        d = self._direction(direction)
        table = d.tables[0]
        if table.pre_circuit:
            raise ProtocolError("exact distribution only for tables without a receiver circuit")
        return self.register.distribution(table.basis, self._block_keys(d, guess, table)[k])

    def _direction(self, name: str) -> Direction:
        for d in self.directions:
            if d.name == name:
                return d
        raise ProtocolError(f"no direction {name!r} in this session")

    def _block_keys(self, d: Direction, perm: Permutation | None, table: DenseCodingTable) -> list[list[ParticleRef]]:
        """Per block, the receiver's qubits in the table's data-slot order."""
        own = self.holdings[f"{d.name}:recv"]
        if perm is not None:
            own = ParticleSequence(perm.inverse().apply(own.items))
        recv_groups = own.chunks(len(d.recv_slots))
        enc_groups = self.transfers[d.name].chunks(len(d.enc_slots))
        out = []
        for enc, recv in zip(enc_groups, recv_groups):
            slot_map = dict(zip(d.enc_slots, enc))
            slot_map.update(zip(d.recv_slots, recv))
            out.append([slot_map[s] for s in table.data_slots])
        return out

    def _decode(self, d: Direction, perm: Permutation | None, branches) -> str:
        # Data-slot layout is shared by both branch tables of a direction.
        groups = self._block_keys(d, perm, d.tables[0])
        out = []
        for k, keys in enumerate(groups):
            table = d.tables[branches[k] if branches else 0]
            for gate, local in table.pre_circuit:
                self.register.apply(gate, [keys[q] for q in local])
            label = self.register.measure(table.basis, keys, self.rng)
            out.append(table.decode_label(label) or "?" * table.bits)
        return "".join(out)


def charlie_disclose(session: Session) -> Disclosure:
    return session.disclose()


def bob_decode(session: Session, disclosure: Disclosure | None, direction: str = "ab") -> str:
    return session.decode(disclosure, direction)


def run_eavesdrop_check(session: Session, link: str) -> float:
    """Run the pending check on ``link`` and return its error rate."""
    for tx in session.checks:
        if tx.link == link and tx.report is None:
            return session._check(tx)
    raise ProtocolError(f"no unchecked transmission on {link}")


def default_messages(config: SessionConfig, rng: np.random.Generator) -> dict[str, str]:
    """Uniformly random messages of the right length for every direction."""
    return {d.name: "".join(str(int(b)) for b in rng.integers(0, 2, d.bits)) for d in plan_directions(config)}


def message_bits(config: SessionConfig) -> dict[str, int]:
    return {d.name: d.bits for d in plan_directions(config)}


def _as_messages(config: SessionConfig, message) -> dict[str, str]:
    if isinstance(message, Mapping):
        return dict(message)
    if isinstance(message, str):
        return {"ab": message}
    if isinstance(message, (tuple, list)) and len(message) == 2:
        return {"ab": message[0], "ba": message[1]}
    raise ConfigError("message must be a bit-string, a pair of them, or a mapping by direction")


def run_session(
    config: SessionConfig, message, adversary: AttackModel | None = None
) -> tuple[Transcript, SessionResult]:
    """Run up to ``max_attempts`` attempts; a detection restarts from preparation."""
    adversary = adversary or AttackModel()
    messages = _as_messages(config, message)
    rng = np.random.default_rng(config.seed)
    transcript = Transcript(config=config, adversary=adversary, messages=dict(messages))
    checks: list[dict] = []
    delivered = None
    attempt = 0
    for attempt in range(1, config.max_attempts + 1):
        session = Session(config, messages, adversary, rng, transcript, attempt)
        ok = session.distribute() and session.transfer()
        checks.extend({"attempt": attempt, "link": tx.link, "sequence": tx.label, **tx.report.to_dict()}
                      for tx in session.checks if tx.report is not None)
        if not ok:
            transcript.log("session", "abort", {"attempt": attempt})
            continue
        disclosure = session.disclose()
        delivered = {d.name: session.decode(disclosure, d.name) for d in session.directions}
        break
    result = SessionResult(delivered, delivered is None, attempt, checks)
    transcript.log("session", "end", {"aborted": result.aborted, "attempts": attempt})
    transcript.result = result.to_dict()
    return transcript, result


# ---------------------------------------------------------- scripted scenarios


def hh_style_session(n: int = 16, seed: int = 0) -> tuple[Transcript, str, str]:
    """Alice prepares the controlled state herself, handing Charlie a separable qubit.

    She uses |psi+>|0> in place of a genuinely three-party state, so Bob's
    Bell measurement decodes without waiting for Charlie.
    """
    rng = np.random.default_rng(seed)
    transcript = Transcript()
    register = Register()
    bell = make_bell("psi+")
    zero = StateVector.basis("0")
    table = dense_coding_table(ChannelSpec("bell", 2, 1, {"variant": "psi+"}))
    sent = "".join(str(int(b)) for b in rng.integers(0, 2, 2 * n))
    alice = []
    for b in range(n):
        register.add([ParticleRef(b, 0), ParticleRef(b, 1)], bell)
        register.add([ParticleRef(b, 2)], zero)
        alice.append(ParticleRef(b, 0))
    transcript.log("alice", "prepare", {"blocks": n, "block_size": 3, "separable_controller": True}, qubit_cost=3 * n)
    transcript.log("alice", "send", {"link": "alice_to_charlie", "length": n})
    transcript.log("alice", "send", {"link": "alice_to_bob", "length": n})
    alice_encode(sent, table, register, alice)
    transcript.log("alice", "encode", {"direction": "ab", "bits": 2 * n})
    transcript.log("alice", "send", {"link": "alice_to_bob", "length": n})
    got = []
    for b in range(n):
        label = register.measure(bell_basis(), [ParticleRef(b, 0), ParticleRef(b, 1)], rng)
        got.append(table.decode_label(label))
    decoded = "".join(got)
    transcript.log("bob", "decode", {"direction": "ab", "message": decoded, "charlie_announced": False})
    transcript.log("session", "end", {"aborted": False, "attempts": 1})
    return transcript, sent, decoded


def pre_disclosure_attempt(n: int = 16, seed: int = 0) -> tuple[Transcript, str, str]:
    """Proposed flow: Bob tries to decode in received order before Charlie speaks."""
    config = SessionConfig("cdsqc", "cl", "bell", n, seed=seed)
    rng = np.random.default_rng(seed)
    messages = default_messages(config, rng)
    session = Session(config, messages, rng=rng)
    session.distribute()
    session.transfer()
    got = session.decode_with_guess("ab", Permutation.identity(n))
    session.log("session", "end", {"aborted": False, "attempts": 1})
    return session.transcript, messages["ab"], got
