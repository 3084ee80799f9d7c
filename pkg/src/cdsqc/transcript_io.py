"""Canonical transcript documents.

A document is JSON Lines with sorted keys and compact separators:

    {"adversary":...,"config":...,"messages":{...},"seed":7,"type":"header","version":"1"}
    {"actor":"charlie","classical_bit_cost":0,"kind":"prepare","payload":{...},"qubit_cost":8,"seq_no":0,"type":"event"}
    ...
    {"aborted":false,"attempts":1,"checks":[...],"delivered":{...},"type":"result"}

``config`` is the session config in its ``key=value;...`` text form and
``adversary`` the attack model text form.
"""

from __future__ import annotations

import json

from .adversary import AttackModel
from .protocol import SessionConfig
from .transcript import Event, Transcript

VERSION = "1"


class TranscriptFormatError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def serialize_transcript(t: Transcript) -> str:
    config = t.config.to_text() if isinstance(t.config, SessionConfig) else (t.config or "")
    adversary = t.adversary.to_text() if isinstance(t.adversary, AttackModel) else (t.adversary or "none")
    header = {
        "type": "header",
        "version": VERSION,
        "config": config,
        "adversary": adversary,
        "seed": t.config.seed if isinstance(t.config, SessionConfig) else None,
        "messages": t.messages,
    }
    lines = [_dump(header)]
    for ev in t.events:
        lines.append(_dump({
            "type": "event",
            "seq_no": ev.seq_no,
            "actor": ev.actor,
            "kind": ev.kind,
            "payload": ev.payload,
            "qubit_cost": ev.qubit_cost,
            "classical_bit_cost": ev.classical_bit_cost,
        }))
    if t.result is not None:
        lines.append(_dump({"type": "result", **t.result}))
    return "\n".join(lines) + "\n"


def parse_transcript(doc: str) -> Transcript:
    lines = [ln for ln in doc.splitlines() if ln.strip()]
    if not lines:
        raise TranscriptFormatError("empty document")
    records = []
    for lineno, line in enumerate(lines, 1):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TranscriptFormatError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        if not isinstance(rec, dict) or "type" not in rec:
            raise TranscriptFormatError(f"line {lineno}: record without a type")
        records.append((lineno, rec))

    lineno, header = records[0]
    if header["type"] != "header":
        raise TranscriptFormatError("line 1: document must start with a header")
    if header.get("version") != VERSION:
        raise TranscriptFormatError(f"version mismatch: document has {header.get('version')!r}, expected {VERSION!r}")
    t = Transcript()
    try:
        t.config = SessionConfig.from_text(header["config"]) if header.get("config") else None
        t.adversary = AttackModel.from_text(header.get("adversary") or "none")
    except ValueError as exc:
        raise TranscriptFormatError(f"line 1: {exc}") from None
    if t.config is not None and header.get("seed") != t.config.seed:
        raise TranscriptFormatError("line 1: header seed disagrees with the config")
    t.messages = header.get("messages")

    body = records[1:]
    if body and body[-1][1]["type"] == "result":
        res = dict(body[-1][1])
        del res["type"]
        t.result = res
        body = body[:-1]
    for idx, (lineno, rec) in enumerate(body):
        if rec["type"] != "event":
            raise TranscriptFormatError(f"line {lineno}: unexpected {rec['type']!r} record")
        if rec.get("seq_no") != idx:
            raise TranscriptFormatError(
                f"line {lineno}: event {rec.get('kind')!r} has seq_no {rec.get('seq_no')!r}, expected {idx}"
            )
        try:
            t.events.append(Event(
                idx, rec["actor"], rec["kind"], rec["payload"], int(rec["qubit_cost"]), int(rec["classical_bit_cost"])
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise TranscriptFormatError(f"line {lineno}: invalid event ({exc})") from None
    return t
