import numpy as np
import pytest

from ghz_selftest.errors import InvalidBloch, InvalidInput
from ghz_selftest.linalg import I2, SIGMA_X, SIGMA_Z, projector
from ghz_selftest.scenario import a_operators, witness_operator
from ghz_selftest.selftest import antipodality_gap
from ghz_selftest.states import (
    aligned_sender_states,
    bloch_to_state,
    ghz_basis_state,
    ghz_povm,
    ideal_sender_states,
    outcome_bits,
    outcome_index,
    outcome_label,
    random_antipodal_strategy,
    random_mixed_strategy,
    random_strategy,
)

SQRT2 = np.sqrt(2)


class TestBloch:
    def test_north_pole(self):
        assert np.abs(bloch_to_state([0, 0, 1]) - np.diag([1.0, 0.0])).max() < 1e-15

    def test_center(self):
        assert np.abs(bloch_to_state([0, 0, 0]) - I2 / 2).max() < 1e-15

    def test_plus_state(self):
        rho = bloch_to_state([1, 0, 0])
        assert abs(rho[0, 1] - 0.5) < 1e-15
        assert np.abs(rho - projector([1, 1])).max() < 1e-15

    def test_too_long(self):
        with pytest.raises(InvalidBloch):
            bloch_to_state([1.0, 1e-5, 0])


class TestOutcomes:
    def test_roundtrip(self):
        for n in (2, 3, 4):
            for m in range(2**n):
                bits = outcome_bits(m, n)
                assert outcome_index(bits, n) == m
                assert outcome_index(outcome_label(m, n), n) == m

    def test_sign_bit_first_in_labels(self):
        # s_1 = 1, s_2 = 0 -> label "10", index 1
        assert outcome_label(1, 2) == "10"
        assert outcome_bits("10", 2) == (1, 0)

    def test_bad_words(self):
        with pytest.raises(InvalidInput):
            outcome_bits("012", 3)
        with pytest.raises(InvalidInput):
            outcome_bits(8, 3)


class TestIdealStates:
    def test_second_sender_assignments(self):
        st = ideal_sender_states(2, 2)
        assert np.abs(st.rho[0, 0] - np.diag([1.0, 0.0])).max() < 1e-15
        assert np.abs(st.rho[1, 1] - projector([1, -1])).max() < 1e-15

    def test_first_sender_orthogonal_pairs(self):
        st = ideal_sender_states(1, 2)
        for x in range(2):
            assert abs(np.trace(st.rho[0, x] @ st.rho[1, x])) < 1e-14

    def test_first_sender_difference_operator(self):
        st = ideal_sender_states(1, 3)
        a0 = st.rho[0, 0] - st.rho[1, 0]
        assert np.abs(a0 - (SIGMA_X + SIGMA_Z) / SQRT2).max() < 1e-12
        a1 = st.rho[0, 1] - st.rho[1, 1]
        assert np.abs(a1 - (SIGMA_X - SIGMA_Z) / SQRT2).max() < 1e-12

    def test_aligned_frame(self):
        st = aligned_sender_states(3, 3)
        assert np.abs((st.rho[0, 0] - st.rho[1, 0]) - SIGMA_X).max() < 1e-14
        assert np.abs((st.rho[0, 1] - st.rho[1, 1]) - SIGMA_Z).max() < 1e-14

    def test_out_of_range(self):
        with pytest.raises(InvalidInput):
            ideal_sender_states(0, 2)
        with pytest.raises(InvalidInput):
            ideal_sender_states(4, 3)

    def test_states_validate(self):
        for j in (1, 2):
            ideal_sender_states(j, 2).validate()
            aligned_sender_states(j, 2).validate()


class TestGhzBasis:
    def test_plus_bell_state(self):
        v = ghz_basis_state(0, 2)
        want = np.zeros(4)
        want[0] = want[3] = 1 / SQRT2
        assert np.abs(v - want).max() < 1e-15

    def test_minus_bell_state(self):
        # s_1 = 1, s_2 = 0
        v = ghz_basis_state((1, 0), 2)
        want = np.zeros(4)
        want[0], want[3] = 1 / SQRT2, -1 / SQRT2
        assert np.abs(v - want).max() < 1e-15

    def test_orthonormal_basis_n3(self):
        vecs = np.stack([ghz_basis_state(m, 3) for m in range(8)])
        gram = vecs.conj() @ vecs.T
        assert np.abs(gram - np.eye(8)).max() < 1e-12

    def test_wrong_length(self):
        with pytest.raises(InvalidInput):
            ghz_basis_state("01", 3)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_witness_expectation_at_ghz_vectors(self, n):
        # canonical-frame reference operators
        from ghz_selftest.robustness import parametrized_a_operators

        ops = parametrized_a_operators([np.pi / 4] * n)
        for m in range(2**n):
            xi = ghz_basis_state(m, n)
            w = witness_operator(n, m, ops)
            val = float((xi.conj() @ (w @ xi)).real)
            assert abs(val - 2 * SQRT2 * (n - 1)) < 1e-10


class TestRandomStrategies:
    def test_deterministic(self):
        s1 = random_strategy(3, 42)
        s2 = random_strategy(3, 42)
        assert all(
            np.array_equal(a.rho, b.rho) for a, b in zip(s1.senders, s2.senders)
        )
        assert np.array_equal(s1.povm.elements, s2.povm.elements)
        s3 = random_strategy(3, 43)
        assert not np.array_equal(s1.povm.elements, s3.povm.elements)

    def test_invariants_hold(self):
        for seed in range(5):
            random_strategy(2, seed).validate()
            random_antipodal_strategy(3, seed).validate()
            random_mixed_strategy(2, seed).validate()

    def test_projective_elements_have_unit_trace(self):
        s = random_strategy(2, 7)
        for m in s.povm.elements:
            assert abs(np.trace(m).real - 1) < 1e-10

    def test_antipodal_variant_is_antipodal(self):
        for seed in range(5):
            assert antipodality_gap(random_antipodal_strategy(2, seed)) < 1e-12

    def test_ghz_povm_validates(self):
        ghz_povm(3).validate()

    def test_a_operators_of_random_are_contractions(self):
        ops = a_operators(random_mixed_strategy(2, 3))
        for j in range(2):
            for x in range(2):
                ev = np.linalg.eigvalsh(ops[j, x])
                assert ev.min() >= -1 - 1e-12 and ev.max() <= 1 + 1e-12
