import numpy as np
import pytest

from densecode.displacement import (
    displacement_op,
    label_pairs,
    local_encoding_set,
    twirl,
    verify_displacement_algebra,
)
from densecode.errors import LayoutError, ParameterError, SizeLimitError
from densecode.linalg import random_density_matrix, random_hermitian

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)


class TestDisplacementOp:
    def test_qubit_identity(self):
        assert np.abs(displacement_op(2, 0, 0) - np.eye(2)).max() == 0

    def test_qubit_shift_is_sigma1(self):
        # hand evaluation of the defining sum at (m, n) = (1, 0)
        assert np.abs(displacement_op(2, 1, 0) - SIGMA_1).max() == 0

    def test_qubit_phase_is_sigma3(self):
        # diag(1, exp(i pi)) = sigma_3
        assert np.abs(displacement_op(2, 0, 1) - SIGMA_3).max() < 1e-15

    def test_qubit_product_label_keeps_phase(self):
        # phases exactly as defined: V_11 = [[0, 1], [-1, 0]], not sigma_2
        expected = np.array([[0, 1], [-1, 0]], dtype=complex)
        assert np.abs(displacement_op(2, 1, 1) - expected).max() < 1e-15

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_unitarity_and_trace(self, d):
        for m, n in label_pairs(d):
            v = displacement_op(d, m, n)
            assert np.abs(v @ v.conj().T - np.eye(d)).max() <= 1e-13
            expected_trace = d if (m, n) == (0, 0) else 0.0
            assert abs(v.trace() - expected_trace) < 1e-12

    def test_label_range_checked(self):
        with pytest.raises(ParameterError):
            displacement_op(2, 2, 0)
        with pytest.raises(ParameterError):
            displacement_op(2, 0, -1)


class TestAlgebraIdentities:
    def test_exhaustive_qubit(self):
        assert verify_displacement_algebra(2).max_deviation <= 1e-14

    def test_exhaustive_qutrit(self):
        assert verify_displacement_algebra(3).max_deviation <= 1e-13

    def test_gram_matrix_qubit(self):
        ops = [displacement_op(2, m, n) for m, n in label_pairs(2)]
        gram = np.array([[ (a @ b.conj().T).trace() for b in ops] for a in ops])
        assert np.abs(gram - 2 * np.eye(4)).max() < 1e-14

    def test_report_carries_per_identity_deviations(self):
        report = verify_displacement_algebra(2)
        assert report.orthogonality_dev <= 1e-14
        assert report.commutation_dev <= 1e-14
        assert report.product_dev <= 1e-14


class TestLocalEncodingSet:
    def test_single_qubit_sender_members(self):
        enc = local_encoding_set([2])
        assert len(enc) == 4
        expected = [
            np.eye(2),
            SIGMA_3,
            SIGMA_1,
            np.array([[0, 1], [-1, 0]], dtype=complex),
        ]  # lexicographic in (m, n)
        for got, want in zip(enc.operators, expected):
            assert np.abs(got - want).max() < 1e-15

    def test_two_sender_cardinality(self):
        enc = local_encoding_set([2, 2])
        assert len(enc) == 16
        assert enc.sender_dim == 4

    @pytest.mark.parametrize("dims", [[2], [3], [2, 2], [2, 3]])
    def test_hilbert_schmidt_orthogonality(self, dims):
        enc = local_encoding_set(dims)
        d_a = enc.sender_dim
        ops = enc.operators
        # brute-force pairwise traces: Gram matrix equals D_A * I
        for i, a in enumerate(ops):
            for j, b in enumerate(ops):
                val = (a @ b.conj().T).trace()
                expected = d_a if i == j else 0.0
                assert abs(val - expected) < 1e-10

    def test_lexicographic_order_two_senders(self):
        enc = local_encoding_set([2, 2])
        # member index 1 is (m1, n1, m2, n2) = (0, 0, 0, 1): I x sigma_3
        assert np.abs(enc.operators[1] - np.kron(np.eye(2), SIGMA_3)).max() < 1e-15
        # member index 4 is (0, 1, 0, 0): sigma_3 x I
        assert np.abs(enc.operators[4] - np.kron(SIGMA_3, np.eye(2))).max() < 1e-15

    def test_enumeration_cap(self):
        with pytest.raises(SizeLimitError):
            local_encoding_set([9, 9])


class TestTwirl:
    def test_identity_fixed_point(self):
        enc = local_encoding_set([2])
        assert np.abs(twirl(enc, np.eye(2)) - np.eye(2)).max() < 1e-14

    def test_pauli_twirl_kills_sigma1(self):
        enc = local_encoding_set([2])
        assert np.abs(twirl(enc, SIGMA_1)).max() < 1e-14

    def test_qutrit_random_hermitian_brute_force(self):
        enc = local_encoding_set([3])
        rng = np.random.default_rng(9)
        x = random_hermitian(3, rng)
        # brute-force sum over the 9 operators
        acc = np.zeros((3, 3), dtype=complex)
        for v in enc.operators:
            acc += v @ x @ v.conj().T
        assert np.abs(twirl(enc, x) - acc / 9).max() < 1e-14
        assert np.abs(twirl(enc, x) - np.trace(x) * np.eye(3) / 3).max() < 1e-10

    @pytest.mark.parametrize("dims", [[2], [3], [2, 2]])
    def test_projects_onto_identity_component(self, dims):
        enc = local_encoding_set(dims)
        d_a = enc.sender_dim
        rng = np.random.default_rng(sum(dims))
        for _ in range(10):
            x = random_hermitian(d_a, rng) + 1j * random_hermitian(d_a, rng)
            out = twirl(enc, x)
            assert np.abs(out - np.trace(x) * np.eye(d_a) / d_a).max() < 1e-10

    def test_idempotent(self):
        enc = local_encoding_set([2, 2])
        rng = np.random.default_rng(21)
        x = random_hermitian(4, rng)
        once = twirl(enc, x)
        assert np.abs(twirl(enc, once) - once).max() < 1e-10

    def test_output_commutes_with_everything(self):
        enc = local_encoding_set([3])
        rng = np.random.default_rng(33)
        x = random_hermitian(3, rng)
        out = twirl(enc, x)
        for _ in range(5):
            r = random_density_matrix(3, rng)
            assert np.abs(out @ r - r @ out).max() < 1e-9

    def test_dimension_mismatch(self):
        enc = local_encoding_set([2])
        with pytest.raises(LayoutError):
            twirl(enc, np.eye(3))
