"""Qubit-efficiency accounting over session transcripts.

eta1 = c / q and eta2 = c / (q + b), where c counts message bits, q qubits and
b classical bits the receiver needs for decoding. Eavesdrop-check traffic never
counts towards b. Decoy qubits count towards q only under ``with_decoys``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .quantum import MAX_BLOCK_QUBITS, CapacityError
from .transcript import DECODE_KINDS, DECOY_KINDS, RESOURCE_KINDS, Transcript

CONVENTIONS = ("without_decoys", "with_decoys")

# The comparison protocol is not simulated; these are its reference counts
# (two GHZ-like states carrying 2 bits, doubled for checking, 3 announced bits).
HH_CONSTANTS = {"c": 2, "q_without": 6, "q_with": 12, "b": 3}


class MetricsError(ValueError):
    pass


def _convention(name: str) -> str:
    name = name.replace("-", "_")
    if name not in CONVENTIONS:
        raise MetricsError(f"unknown convention {name!r}")
    return name


@dataclass(frozen=True)
class ResourceCount:
    c: int
    q: int
    b: int
    q_decoy: int
    convention: str
    b_strict: int | None = None

    def __post_init__(self):
        if min(self.c, self.q, self.b, self.q_decoy) < 0:
            raise MetricsError("counts must be non-negative")
        if self.convention == "with_decoys" and self.q_decoy > self.q:
            raise MetricsError("decoys cannot exceed the total qubit count")

    def __add__(self, other: "ResourceCount") -> "ResourceCount":
        if self.convention != other.convention:
            raise MetricsError("cannot add counts under different conventions")
        strict = None
        if self.b_strict is not None and other.b_strict is not None:
            strict = self.b_strict + other.b_strict
        return ResourceCount(self.c + other.c, self.q + other.q, self.b + other.b,
                             self.q_decoy + other.q_decoy, self.convention, strict)


def count_resources(transcript: Transcript, convention: str = "without_decoys", strict: bool = False) -> ResourceCount:
    """Counters derived only from transcript events."""
    convention = _convention(convention)
    if not transcript.complete:
        raise MetricsError("transcript is incomplete (no end event)")
    c = q_res = q_dec = b = b_strict = 0
    for ev in transcript.events:
        if ev.kind == "encode":
            c += int(ev.payload["bits"])
        if ev.kind in RESOURCE_KINDS:
            q_res += ev.qubit_cost
        elif ev.kind in DECOY_KINDS:
            q_dec += ev.qubit_cost
        if ev.kind in DECODE_KINDS:
            b += ev.classical_bit_cost
            b_strict += int(ev.payload.get("strict_bits", ev.classical_bit_cost))
    q = q_res + q_dec if convention == "with_decoys" else q_res
    return ResourceCount(c, q, b, q_dec, convention, b_strict if strict else None)


def percent(value: Fraction, places: int = 2) -> str:
    """Percentage rounded half-up to ``places`` decimals, trailing zeros trimmed."""
    scaled = Fraction(value) * 100 * 10**places
    rounded = math.floor(scaled + Fraction(1, 2))
    text = f"{rounded // 10**places}.{rounded % 10**places:0{places}d}"
    return (text.rstrip("0").rstrip(".") if "." in text else text) + "%"


@dataclass(frozen=True)
class EfficiencyReport:
    eta1: Fraction
    eta2: Fraction
    counts: ResourceCount
    label: str = ""

    def as_percentages(self) -> tuple[str, str]:
        return percent(self.eta1), percent(self.eta2)


def efficiency(counts: ResourceCount, label: str = "") -> EfficiencyReport:
    if counts.q <= 0:
        raise MetricsError("qubit count must be positive")
    return EfficiencyReport(Fraction(counts.c, counts.q), Fraction(counts.c, counts.q + counts.b), counts, label)


def cat_asymptotic(m: int) -> float:
    """Reference eta2 = 2m/(5m+1) for the cat-state controlled channel."""
    return float(cat_closed_form(m)["with_decoys"][1])


def cat_closed_form(m: int | None) -> dict[str, tuple[Fraction, Fraction]]:
    """Reference counts c=2m, q=2m or 5m, b=1; ``None`` gives the m -> infinity limit."""
    if m is None:
        return {"without_decoys": (Fraction(1), Fraction(1)), "with_decoys": (Fraction(2, 5), Fraction(2, 5))}
    if int(m) != m or m < 1:
        raise MetricsError("m must be a positive integer")
    c = 2 * m
    return {
        "without_decoys": (Fraction(c, 2 * m), Fraction(c, 2 * m + 1)),
        "with_decoys": (Fraction(c, 5 * m), Fraction(c, 5 * m + 1)),
    }


def hh_counts(convention: str) -> ResourceCount:
    convention = _convention(convention)
    q = HH_CONSTANTS["q_with" if convention == "with_decoys" else "q_without"]
    return ResourceCount(HH_CONSTANTS["c"], q, HH_CONSTANTS["b"], q - HH_CONSTANTS["q_without"], convention)


@dataclass(frozen=True)
class Table1Row:
    label: str
    source: str
    without: tuple[Fraction, Fraction]
    with_: tuple[Fraction, Fraction]

    def cells(self) -> list[str]:
        return [percent(x) for x in (*self.without, *self.with_)]


def _live_row(label: str, config, seed: int) -> Table1Row:
    from .protocol import default_messages, run_session

    transcript, result = run_session(config, default_messages(config, np.random.default_rng(seed)))
    if result.aborted:
        raise MetricsError(f"honest session for {label!r} aborted")
    reps = {conv: efficiency(count_resources(transcript, conv)) for conv in CONVENTIONS}
    return Table1Row(
        label,
        f"transcript n={config.n}",
        (reps["without_decoys"].eta1, reps["without_decoys"].eta2),
        (reps["with_decoys"].eta1, reps["with_decoys"].eta2),
    )


def table1_reproduce(n: int = 8, seed: int = 0) -> list[Table1Row]:
    """The five comparison rows; the first from constants, the cat row from its closed-form limit."""
    from .protocol import SessionConfig

    hh = {conv: efficiency(hh_counts(conv)) for conv in CONVENTIONS}
    cat = cat_closed_form(None)
    return [
        Table1Row("HH", "reference constants",
                  (hh["without_decoys"].eta1, hh["without_decoys"].eta2),
                  (hh["with_decoys"].eta1, hh["with_decoys"].eta2)),
        _live_row("proposed CDSQC (unidirectional, Bell states)", SessionConfig("cdsqc", "cl", "bell", n, seed=seed), seed),
        _live_row("proposed CBDSQC (bidirectional, Bell states)", SessionConfig("cbdsqc", "cl", "bell", n, seed=seed), seed),
        _live_row("CDSQC alt3 (GHZ-like, Bell collapse)", SessionConfig("cdsqc_alt3", "cl", "ghz-like", n, seed=seed), seed),
        Table1Row("CDSQC alt3 ((2m+1)-qubit cat, m >> 1)", "closed-form limit", cat["without_decoys"], cat["with_decoys"]),
    ]


def format_table(rows: list[Table1Row], as_csv: bool = False) -> str:
    header = ["protocol", "eta1 (no decoys)", "eta2 (no decoys)", "eta1 (decoys)", "eta2 (decoys)", "source"]
    body = [[r.label, *r.cells(), r.source] for r in rows]
    if as_csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    widths = [max(len(str(row[i])) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header, *body]]
    return "\n".join(lines) + "\n"


def cat_session_counts(m: int, n: int = 2, seed: int = 0, block_limit: int | None = None):
    """Live cat-channel session; returns the efficiency report per convention."""
    from .protocol import SessionConfig, default_messages, run_session

    limit = block_limit if block_limit is not None else max(16, 2 * m + 1)
    if 2 * m + 1 > MAX_BLOCK_QUBITS:
        raise CapacityError(f"a {2 * m + 1}-qubit cat block cannot be simulated (limit {MAX_BLOCK_QUBITS})")
    config = SessionConfig("cdsqc_alt3", "cl", f"cat:m={m}", n, seed=seed, block_limit=limit)
    transcript, result = run_session(config, default_messages(config, np.random.default_rng(seed)))
    if result.aborted:
        raise MetricsError("honest cat session aborted")
    return {conv: efficiency(count_resources(transcript, conv)) for conv in CONVENTIONS}
