"""Simulator for controlled deterministic secure quantum communication."""

from .adversary import AttackModel, TapPoint, apply_attack, run_semi_honest_scenario
from .checks import CheckReport, DecoyBatch, bb84_check, gv_check, prepare_decoys
from .metrics import (
    EfficiencyReport,
    ResourceCount,
    cat_asymptotic,
    count_resources,
    efficiency,
    table1_reproduce,
)
from .protocol import (
    ConfigError,
    Disclosure,
    DisclosureMissing,
    Session,
    SessionConfig,
    SessionResult,
    alice_encode,
    bob_decode,
    charlie_disclose,
    charlie_permute,
    charlie_prepare,
    insert_decoys,
    run_eavesdrop_check,
    run_session,
)
from .quantum import MeasurementBasis, Register, StateVector
from .sequences import ParticleRef, ParticleSequence, Permutation
from .states import ChannelSpec, dense_coding_table, parse_channel
from .transcript import Event, Transcript
from .transcript_io import parse_transcript, serialize_transcript

__version__ = "0.1.0"

__all__ = [
    "AttackModel",
    "ChannelSpec",
    "CheckReport",
    "ConfigError",
    "DecoyBatch",
    "Disclosure",
    "DisclosureMissing",
    "EfficiencyReport",
    "Event",
    "MeasurementBasis",
    "ParticleRef",
    "ParticleSequence",
    "Permutation",
    "Register",
    "ResourceCount",
    "Session",
    "SessionConfig",
    "SessionResult",
    "StateVector",
    "TapPoint",
    "Transcript",
    "alice_encode",
    "apply_attack",
    "bb84_check",
    "bob_decode",
    "cat_asymptotic",
    "charlie_disclose",
    "charlie_permute",
    "charlie_prepare",
    "count_resources",
    "dense_coding_table",
    "efficiency",
    "gv_check",
    "insert_decoys",
    "parse_channel",
    "parse_transcript",
    "prepare_decoys",
    "run_eavesdrop_check",
    "run_semi_honest_scenario",
    "run_session",
    "serialize_transcript",
    "table1_reproduce",
]
