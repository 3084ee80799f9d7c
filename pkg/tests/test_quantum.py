import itertools
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdsqc.quantum import (
    BELL_LABELS,
    IY,
    CapacityError,
    Gate,
    H,
    I,
    MeasurementBasis,
    QuantumError,
    Register,
    StateVector,
    X,
    Z,
    apply_gate,
    bell_basis,
    complete_basis,
    computational_basis,
    diagonal_basis,
    fidelity,
    measure_enumerate,
    measure_sampled,
    tensor,
)

S = 1 / sqrt(2)
PSI_P = StateVector(2, [S, 0, 0, S])
PSI_M = StateVector(2, [S, 0, 0, -S])
PHI_P = StateVector(2, [0, S, S, 0])
PLUS = StateVector(1, [S, S])
MINUS = StateVector(1, [S, -S])
ZERO = StateVector.basis("0")


def _bit(index, qubit, n):
    return (index >> (n - 1 - qubit)) & 1


def _brute_bell_pair_overlap(state, pair_a, pair_b, bell_a, bell_b):
    """Amplitude <bell_a|_{pair_a} <bell_b|_{pair_b} |state> by explicit summation."""
    n = state.num_qubits
    total = 0j
    for idx in range(2**n):
        a = 2 * _bit(idx, pair_a[0], n) + _bit(idx, pair_a[1], n)
        b = 2 * _bit(idx, pair_b[0], n) + _bit(idx, pair_b[1], n)
        total += np.conj(bell_a[a]) * np.conj(bell_b[b]) * state.amplitudes[idx]
    return total


class TestConstruction:
    def test_rejects_unnormalized(self):
        with pytest.raises(QuantumError):
            StateVector(1, [1, 1])

    def test_rejects_wrong_length(self):
        with pytest.raises(QuantumError):
            StateVector(2, [1, 0])

    def test_rejects_non_unitary_gate(self):
        with pytest.raises(QuantumError):
            Gate(1, [[1, 1], [0, 1]])

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(QuantumError):
            MeasurementBasis("custom", ("a", "b"), [[1, 0], [S, S]])

    def test_complete_basis(self):
        vecs = complete_basis(PSI_P.amplitudes[None, :], 4)
        assert vecs.shape == (4, 4)
        assert np.allclose(vecs.conj() @ vecs.T, np.eye(4), atol=1e-12)


class TestTensor:
    def test_basis_states(self):
        out = tensor(ZERO, ZERO)
        assert out.num_qubits == 2
        assert out.amplitudes[0] == 1

    def test_bell_pairs(self):
        out = tensor(PSI_P, PSI_P)
        nonzero = set(np.flatnonzero(np.abs(out.amplitudes) > 1e-12))
        assert nonzero == {0b0000, 0b0011, 0b1100, 0b1111}
        assert np.allclose(out.amplitudes[list(nonzero)], 0.5)

    def test_plus_minus(self):
        assert np.allclose(tensor(PLUS, MINUS).amplitudes, [0.5, -0.5, 0.5, -0.5])

    def test_capacity(self):
        big = StateVector.basis("0" * 10)
        with pytest.raises(CapacityError):
            tensor(big, big)


class TestApplyGate:
    def test_x_on_psi_plus_gives_phi_plus(self):
        assert fidelity(apply_gate(PSI_P, X, [0]), PHI_P) == pytest.approx(1, abs=1e-12)

    def test_identity(self):
        out = apply_gate(PSI_P, I, [1])
        assert np.allclose(out.amplitudes, PSI_P.amplitudes)

    def test_z_matches_matrix_oracle(self):
        expected = np.kron(Z.matrix, np.eye(2)) @ PSI_P.amplitudes
        out = apply_gate(PSI_P, Z, [0])
        assert np.allclose(out.amplitudes, expected)
        assert fidelity(out, PSI_M) == pytest.approx(1, abs=1e-12)

    def test_target_order_matches_kron(self):
        rng = np.random.default_rng(3)
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        st_ = StateVector.from_amplitudes(vec, normalize=True)
        cnot = Gate(2, np.eye(4)[[0, 1, 3, 2]])
        # CNOT with control 2, target 0: permute axes by hand.
        expected = np.zeros(8, complex)
        for idx in range(8):
            b0, b1, b2 = _bit(idx, 0, 3), _bit(idx, 1, 3), _bit(idx, 2, 3)
            new = ((b0 ^ b2) << 2) | (b1 << 1) | b2
            expected[new] = st_.amplitudes[idx]
        assert np.allclose(apply_gate(st_, cnot, [2, 0]).amplitudes, expected)

    def test_errors(self):
        with pytest.raises(QuantumError):
            apply_gate(PSI_P, X, [2])
        with pytest.raises(QuantumError):
            apply_gate(PSI_P, X, [0, 1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 5), st.data())
    def test_norm_preserved(self, n, data):
        seed = data.draw(st.integers(0, 2**32 - 1))
        rng = np.random.default_rng(seed)
        vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        state = StateVector.from_amplitudes(vec, normalize=True)
        gate = data.draw(st.sampled_from([I, X, IY, Z, H]))
        q = data.draw(st.integers(0, n - 1))
        out = apply_gate(state, gate, [q])
        assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


class TestMeasurement:
    def test_eigenstate_computational(self):
        rng = np.random.default_rng(0)
        label, post = measure_sampled(StateVector.basis("00"), computational_basis(2), [0, 1], rng)
        assert label == "00"
        assert fidelity(post, StateVector.basis("00")) == pytest.approx(1)

    def test_bell_eigenstates(self):
        rng = np.random.default_rng(0)
        basis = bell_basis()
        for label in BELL_LABELS:
            state = basis.vector(label)
            for _ in range(5):
                got, _ = measure_sampled(state, basis, [0, 1], rng)
                assert got == label

    def test_single_qubit_of_bell_pair(self):
        dist = measure_enumerate(PSI_P, computational_basis(1), [0])
        assert dist.probabilities() == pytest.approx({"0": 0.5, "1": 0.5})
        assert fidelity(dist["0"].post_state, StateVector.basis("00")) == pytest.approx(1)
        assert fidelity(dist["1"].post_state, StateVector.basis("11")) == pytest.approx(1)

    def test_cross_pair_bell_measurement_is_uniform(self):
        state = tensor(PSI_P, PSI_P)
        dist = measure_enumerate(state, bell_basis(), [0, 2])
        basis = bell_basis()
        # Oracle: expand in the (0,2)(1,3) Bell product basis by explicit summation.
        for la in BELL_LABELS:
            prob = sum(
                abs(_brute_bell_pair_overlap(state, (0, 2), (1, 3), basis.vectors[BELL_LABELS.index(la)], basis.vectors[i])) ** 2
                for i in range(4)
            )
            assert prob == pytest.approx(0.25, abs=1e-12)
            assert dist[la].probability == pytest.approx(0.25, abs=1e-12)

    def test_trivial_distributions(self):
        assert measure_enumerate(StateVector.basis("00"), computational_basis(1), [0]).probabilities() == {"0": 1.0}
        assert measure_enumerate(PLUS, computational_basis(1), [0]).probabilities() == pytest.approx(
            {"0": 0.5, "1": 0.5}
        )

    def test_pauli_encodings_orthogonal(self):
        states = [apply_gate(PSI_P, g, [0]) for g in (I, X, IY, Z)]
        for a, b in itertools.combinations(states, 2):
            assert fidelity(a, b) < 1e-12

    def test_sampling_matches_enumeration(self):
        rng = np.random.default_rng(11)
        state = StateVector.from_amplitudes([0.6, 0.8j])
        basis = diagonal_basis()
        probs = measure_enumerate(state, basis, [0]).probabilities()
        n = 10_000
        hits = sum(measure_sampled(state, basis, [0], rng)[0] == "+" for _ in range(n))
        p = probs["+"]
        assert abs(hits / n - p) < 3 * sqrt(p * (1 - p) / n)

    def test_sampling_deterministic_given_seed(self):
        basis = bell_basis()
        state = tensor(PSI_P, PSI_P)
        a = [measure_sampled(state, basis, [0, 2], np.random.default_rng(5))[0] for _ in range(3)]
        b = [measure_sampled(state, basis, [0, 2], np.random.default_rng(5))[0] for _ in range(3)]
        assert a == b


class TestFidelity:
    def test_values(self):
        assert fidelity(PSI_P, PSI_P) == pytest.approx(1)
        assert fidelity(PSI_P, PHI_P) == pytest.approx(0)
        assert fidelity(ZERO, PLUS) == pytest.approx(0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(QuantumError):
            fidelity(ZERO, PSI_P)


class TestRegister:
    def test_entanglement_swap_splits_blocks(self):
        reg = Register()
        reg.add(["a1", "a2"], PSI_P)
        reg.add(["b1", "b2"], PSI_P)
        rng = np.random.default_rng(1)
        label = reg.measure(bell_basis(), ["a1", "b1"], rng)
        keys, state = reg.block_of("a2")
        assert sorted(keys) == ["a2", "b2"]
        # Partner qubits end up in a Bell state correlated with the swap outcome.
        assert max(fidelity(state, bell_basis().vector(lbl)) for lbl in BELL_LABELS) == pytest.approx(1)
        keys, state = reg.block_of("a1")
        assert keys == ["a1", "b1"]
        assert fidelity(state, bell_basis().vector(label)) == pytest.approx(1)

    def test_apply_and_remove(self):
        reg = Register()
        reg.add(["x"], ZERO)
        reg.apply(X, ["x"])
        assert fidelity(reg.remove(["x"]), StateVector.basis("1")) == pytest.approx(1)
        assert "x" not in reg

    def test_remove_reorders(self):
        reg = Register()
        reg.add(["a", "b"], StateVector.basis("01"))
        assert fidelity(reg.remove(["b", "a"]), StateVector.basis("10")) == pytest.approx(1)
