from collections import Counter
from math import log2, sqrt

import numpy as np
import pytest

from cdsqc.adversary import AttackError, AttackModel, TapPoint, apply_attack, run_semi_honest_scenario
from cdsqc.protocol import Session, SessionConfig, default_messages, run_session
from cdsqc.quantum import Register, StateVector, bell_basis, diagonal_basis, fidelity
from cdsqc.sequences import ParticleRef
from cdsqc.states import make_bell
from cdsqc.transcript_io import serialize_transcript


def _mutual_information(pairs) -> float:
    n = len(pairs)
    joint = Counter(pairs)
    px = Counter(x for x, _ in pairs)
    py = Counter(y for _, y in pairs)
    return sum(c / n * log2(c * n / (px[x] * py[y])) for (x, y), c in joint.items())


class TestModel:
    def test_probability_range(self):
        with pytest.raises(AttackError):
            AttackModel("intercept_resend_random_basis", 1.5)

    def test_unknown(self):
        with pytest.raises(AttackError):
            AttackModel("photon_splitting")

    def test_alias(self):
        assert AttackModel("intercept-resend").kind == "intercept_resend_random_basis"

    @pytest.mark.parametrize("model", [
        AttackModel(),
        AttackModel("bell_pairing", 0.5, "random", ("charlie_to_bob",)),
        AttackModel("intercept_resend_computational"),
    ])
    def test_text_round_trip(self, model):
        assert AttackModel.from_text(model.to_text()) == model

    def test_tap_position(self):
        with pytest.raises(AttackError):
            TapPoint("charlie_to_bob", "before_decoys")

    def test_semi_honest_is_not_a_tap(self):
        with pytest.raises(AttackError):
            apply_attack(AttackModel("semi_honest_alice_substitution"), TapPoint("alice_to_bob"), Register(), [], None)


class TestApply:
    def test_none_is_identity(self):
        reg = Register()
        reg.add(["q"], StateVector.basis("0"))
        assert apply_attack(AttackModel(), TapPoint("alice_to_bob"), reg, ["q"], np.random.default_rng(0)) == []
        assert fidelity(reg.remove(["q"]), StateVector.basis("0")) == 1

    def test_diagonal_measurement_of_zero(self):
        plus, minus = diagonal_basis().vector("+"), diagonal_basis().vector("-")
        counts = Counter()
        rng = np.random.default_rng(3)
        for _ in range(4000):
            reg = Register()
            reg.add(["q"], StateVector.basis("0"))
            log = apply_attack(AttackModel("intercept_resend_random_basis"), TapPoint("charlie_to_bob"), reg, ["q"], rng)
            if log[0]["basis"] != "x":
                continue
            out = reg.remove(["q"])
            label = "+" if fidelity(out, plus) > 0.999 else "-"
            assert fidelity(out, plus if label == "+" else minus) == pytest.approx(1)
            counts[label] += 1
        total = sum(counts.values())
        assert abs(counts["+"] / total - 0.5) < 3 * sqrt(0.25 / total)

    def test_wrong_pairing_scrambles_partners(self):
        reg = Register()
        a1, b1, a2, b2 = (ParticleRef(0, 0), ParticleRef(0, 1), ParticleRef(1, 0), ParticleRef(1, 1))
        reg.add([a1, b1], make_bell("psi+"))
        reg.add([a2, b2], make_bell("psi+"))
        apply_attack(AttackModel("bell_pairing"), TapPoint("charlie_to_bob"), reg, [a1, a2, b1, b2], np.random.default_rng(0))
        # The true partners (a1, b1) are now in a product of two Eve-measured pairs: uniform Bell outcomes.
        probs = reg.distribution(bell_basis(), [a1, b1]).probabilities()
        assert probs == pytest.approx({"psi+": 0.25, "phi+": 0.25, "phi-": 0.25, "psi-": 0.25}, abs=1e-12)

    def test_none_matches_honest_transcript(self):
        cfg = SessionConfig(n=4, seed=9)
        msg = default_messages(cfg, np.random.default_rng(1))
        honest, _ = run_session(cfg, msg)
        none, _ = run_session(cfg, msg, AttackModel("none"))
        assert serialize_transcript(honest) == serialize_transcript(none)


class TestSemiHonest:
    def test_hh_style_bypasses_control(self):
        out = run_semi_honest_scenario("hh_style_alice_prepares")
        assert out["control_bypassed"] is True
        assert not out["evidence"].has("disclose_measurement")

    def test_proposed_flow_keeps_control(self):
        out = run_semi_honest_scenario("proposed_charlie_prepares")
        assert out["control_bypassed"] is False

    def test_pre_disclosure_accuracy_is_chance(self):
        out = run_semi_honest_scenario("proposed_charlie_prepares", n=10_000, seed=4)
        assert abs(out["accuracy"] - 0.25) < 0.02

    def test_unknown_flow(self):
        with pytest.raises(AttackError):
            run_semi_honest_scenario("bogus")


def test_eve_learns_nothing_about_the_message():
    """Bell-pairing Eve on the distribution legs: her labels are independent of the later message."""
    samples = []
    seed = 0
    while len(samples) < 10_000:
        cfg = SessionConfig("cdsqc", "cl", "bell", 64, seed=seed, error_threshold=1.0)
        rng = np.random.default_rng(seed)
        msgs = default_messages(cfg, rng)
        legs = ("charlie_to_alice", "charlie_to_bob")
        session = Session(cfg, msgs, AttackModel("bell_pairing", links=legs), rng)
        session.distribute()
        for attack, tx in zip(session.transcript.find("attack"), session.checks):
            for rec in attack.payload["records"]:
                refs = [tx.sent[p] for p in rec["positions"] if tx.sent[p].kind == "message"]
                if refs:
                    k = refs[0].block
                    samples.append((rec["outcome"], msgs["ab"][2 * k : 2 * k + 2]))
        seed += 1
    assert _mutual_information(samples[:10_000]) < 0.01
