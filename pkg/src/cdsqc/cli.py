"""Command-line front end.

Exit codes: 0 success, 1 a session aborted on detection, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .adversary import ALIASES, LINKS, AttackError, AttackModel
from .protocol import (
    PROTOCOLS,
    SUBPROTOCOLS,
    ConfigError,
    SessionConfig,
    default_messages,
    message_bits,
    run_session,
)
from .states import ChannelError
from .transcript_io import TranscriptFormatError, parse_transcript, serialize_transcript

EXIT_OK, EXIT_ABORT, EXIT_CONFIG = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_message(text: str, bits: int) -> str:
    """Hex by default; ``0b`` prefix for a literal bit-string."""
    text = text.strip()
    if text.lower().startswith("0b"):
        out = text[2:]
        if not out or set(out) - {"0", "1"}:
            raise UsageError(f"bad binary message {text!r}")
    else:
        if text.lower().startswith("0x"):
            text = text[2:]
        try:
            out = "".join(format(int(ch, 16), "04b") for ch in text)
        except ValueError:
            raise UsageError(f"bad hex message {text!r}") from None
    if len(out) != bits:
        raise UsageError(f"message has {len(out)} bits, this configuration carries {bits}")
    return out


def _attack(args) -> AttackModel:
    links = tuple(args.attack_links.split("+")) if args.attack_links else LINKS
    return AttackModel(args.attack, args.attack_probability, args.attack_pairing, links)


def _config(args, seed: int) -> SessionConfig:
    return SessionConfig(
        protocol=args.protocol,
        subprotocol=args.subprotocol,
        channel=args.channel,
        n=args.n,
        check=args.check,
        decoy_fraction=args.decoy_fraction,
        seed=seed,
        error_threshold=args.error_threshold,
        max_attempts=args.max_attempts,
        block_limit=args.block_limit,
    )


def _out_path(base: str, index: int, repeat: int) -> Path:
    path = Path(base)
    return path if repeat == 1 else path.with_name(f"{path.stem}.{index}{path.suffix}")


def cmd_run(args, out) -> int:
    attack = _attack(args)
    status = EXIT_OK
    for i in range(args.repeat):
        config = _config(args, args.seed + i)
        bits = message_bits(config)
        if args.message:
            if len(args.message) != len(bits):
                raise UsageError(f"{config.protocol} needs {len(bits)} --message value(s)")
            messages = {name: parse_message(m, bits[name]) for name, m in zip(bits, args.message)}
        else:
            messages = default_messages(config, np.random.default_rng(config.seed))
        transcript, result = run_session(config, messages, attack)
        if args.out:
            _out_path(args.out, i, args.repeat).write_text(serialize_transcript(transcript))
        report = metrics.efficiency(metrics.count_resources(transcript, args.convention))
        eta1, eta2 = report.as_percentages()
        worst = max((c["error_rate"] for c in result.checks), default=0.0)
        line = f"seed={config.seed} aborted={str(result.aborted).lower()} max_error_rate={worst:.4f}"
        if not result.aborted:
            ok = result.delivered == messages
            line += f" delivered={'exact' if ok else 'corrupted'} eta1={eta1} eta2={eta2}"
        print(line, file=out)
        if result.aborted:
            status = EXIT_ABORT
    return status


def cmd_report(args, out) -> int:
    if args.what == "table1":
        text = metrics.format_table(metrics.table1_reproduce(args.n, args.seed), as_csv=args.csv)
    else:
        text = detection_report(args.n, args.trials, args.seed, args.check, csv=args.csv)
    if args.out:
        Path(args.out).write_text(text)
    out.write(text)
    return EXIT_OK


def detection_report(n: int, trials: int, seed: int, check: str, csv: bool = False) -> str:
    """Abort rates over seeded sessions for each channel attack."""
    rows = []
    charlie_legs = ("charlie_to_alice", "charlie_to_bob")
    attacks = [AttackModel("none"), AttackModel("intercept_resend_random_basis", links=charlie_legs),
               AttackModel("intercept_resend_computational", links=charlie_legs),
               AttackModel("bell_pairing", links=charlie_legs)]
    for attack in attacks:
        aborted = decoys = 0
        for i in range(trials):
            config = SessionConfig("cdsqc", "cl", "bell", n, check=check, seed=seed + i)
            transcript, result = run_session(config, default_messages(config, np.random.default_rng(seed + i)), attack)
            aborted += result.aborted
            decoys = sum(e.qubit_cost for e in transcript.events
                         if e.kind == "prepare_decoys" and e.payload["link"] in charlie_legs)
        rows.append([attack.to_text(), check, str(decoys), str(trials), f"{aborted / trials:.4f}"])
    header = ["attack", "check", "attacked_decoys", "trials", "abort_rate"]
    sep = "," if csv else "  "
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    fmt = (lambda r: ",".join(r)) if csv else (lambda r: sep.join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(fmt(r) for r in [header, *rows]) + "\n"


def cmd_replay(args, out) -> int:
    doc = Path(args.file).read_text()
    stored = parse_transcript(doc)
    for conv in metrics.CONVENTIONS:
        rep = metrics.efficiency(metrics.count_resources(stored, conv))
        eta1, eta2 = rep.as_percentages()
        c = rep.counts
        print(f"{conv}: c={c.c} q={c.q} b={c.b} eta1={eta1} eta2={eta2}", file=out)
    if stored.config is None or stored.messages is None:
        raise UsageError("document has no config or messages to replay")
    transcript, result = run_session(stored.config, stored.messages, stored.adversary)
    same = serialize_transcript(transcript) == doc
    print(f"replay {'identical' if same else 'DIFFERS'}", file=out)
    if not same:
        return EXIT_CONFIG
    return EXIT_ABORT if result.aborted else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdsqc", description="Controlled secure direct communication simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more sessions")
    run.add_argument("--protocol", choices=PROTOCOLS, default="cdsqc")
    run.add_argument("--channel", default="bell")
    run.add_argument("--subprotocol", choices=SUBPROTOCOLS, default="cl")
    run.add_argument("--n", type=int, default=4)
    run.add_argument("--check", choices=("bb84", "gv"), default="bb84")
    run.add_argument("--attack", choices=sorted(set(ALIASES) | set(ALIASES.values())), default="none")
    run.add_argument("--attack-probability", type=float, default=1.0)
    run.add_argument("--attack-pairing", choices=("adjacent", "random"), default="adjacent")
    run.add_argument("--attack-links", help="'+'-separated links, default all")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--message", action="append", help="hex (or 0b...) message; twice for cbdsqc")
    run.add_argument("--out")
    run.add_argument("--decoy-fraction", type=float, default=0.5)
    run.add_argument("--error-threshold", type=float, default=0.0)
    run.add_argument("--max-attempts", type=int, default=1)
    run.add_argument("--block-limit", type=int, default=16)
    run.add_argument("--convention", choices=("with-decoys", "without-decoys"), default="with-decoys")
    run.add_argument("--repeat", type=int, default=1)
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="efficiency table or detection summary")
    rep.add_argument("what", choices=("table1", "detection"))
    rep.add_argument("--n", type=int, default=8)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--trials", type=int, default=200)
    rep.add_argument("--check", choices=("bb84", "gv"), default="bb84")
    rep.add_argument("--csv", action="store_true")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)

    replay = sub.add_parser("replay", help="recount a stored transcript and re-run it")
    replay.add_argument("file")
    replay.set_defaults(func=cmd_replay)
    return parser


def cli_main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if getattr(args, "repeat", 1) < 1:
        print("error: --repeat must be at least 1", file=err)
        return EXIT_CONFIG
    try:
        return args.func(args, out)
    except (ConfigError, ChannelError, AttackError, UsageError, TranscriptFormatError, metrics.MetricsError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
