import numpy as np
import pytest

from qvote.errors import ValidationError
from qvote.qstate import MINUS, ONE, PLUS, ZERO, apply_unitary, equal_up_to_global_phase, is_unitary, tensor
from qvote.states import (
    GHZ_LABELS,
    BellLabel,
    ControllerBasis,
    GhzLabel,
    GhzLikeSpec,
    PauliOp,
    Sign,
    bell,
    bell_basis,
    bell_transition,
    bell_transition_inverse,
    ghz,
    ghz_basis,
    ghz_like,
    identify_bell,
    tzl_channel,
)


class TestLabels:
    def test_ghz_label_round_trip(self):
        for g in GHZ_LABELS:
            assert GhzLabel.parse(str(g)) == g

    def test_ghz_label_format(self):
        assert str(GhzLabel(3, Sign.MINUS)) == "GHZ3-"

    @pytest.mark.parametrize("text", ["GHZ4+", "GHZ0*", "BELL0", "GHZ0"])
    def test_bad_ghz_labels(self, text):
        with pytest.raises((ValidationError, ValueError)):
            GhzLabel.parse(text)

    def test_eight_ghz_labels(self):
        assert len(set(GHZ_LABELS)) == 8


class TestPaulis:
    @pytest.mark.parametrize("op", list(PauliOp))
    def test_unitary(self, op):
        assert is_unitary(op.matrix)

    def test_iy_convention(self):
        assert np.allclose(PauliOp.IY.matrix, [[0, 1], [-1, 0]])
        y = np.array([[0, -1j], [1j, 0]])
        assert np.allclose(PauliOp.IY.matrix, 1j * y)

    def test_matrices_read_only(self):
        with pytest.raises(ValueError):
            PauliOp.X.matrix[0, 0] = 1


class TestBell:
    def test_conventions(self):
        s = 1 / np.sqrt(2)
        assert np.allclose(bell(BellLabel.PSI_PLUS).amplitudes, [s, 0, 0, s])
        assert np.allclose(bell(BellLabel.PHI_MINUS).amplitudes, [0, s, -s, 0])

    def test_basis_is_complete(self):
        assert len(bell_basis().labels) == 4

    def test_identify(self):
        for label in BellLabel:
            assert identify_bell(-1j * bell(label)) is label
        with pytest.raises(ValidationError):
            identify_bell(tensor(ZERO, ZERO))

    @pytest.mark.parametrize("initial", list(BellLabel))
    def test_transition_is_a_bijection(self, initial):
        images = {bell_transition(initial, op) for op in PauliOp}
        assert images == set(BellLabel)
        for op in PauliOp:
            assert bell_transition_inverse(initial, bell_transition(initial, op)) is op

    def test_known_transitions(self):
        assert bell_transition(BellLabel.PSI_PLUS, PauliOp.Z) is BellLabel.PSI_MINUS
        assert bell_transition(BellLabel.PSI_PLUS, PauliOp.X) is BellLabel.PHI_PLUS
        assert bell_transition(BellLabel.PHI_PLUS, PauliOp.Z) is BellLabel.PHI_MINUS


class TestGhz:
    def test_ghz_amplitudes(self):
        s = ghz(GhzLabel(3, Sign.MINUS)).amplitudes
        assert np.isclose(s[3], 1 / np.sqrt(2)) and np.isclose(s[4], -1 / np.sqrt(2))

    def test_basis_orthonormal(self):
        m = ghz_basis().matrix
        assert np.allclose(m.conj() @ m.T, np.eye(8))

    def test_tzl_channel(self):
        amps = tzl_channel().amplitudes
        # |0000>, |1110>, |0011>, |1101> each with amplitude 1/2
        nonzero = {i for i in range(16) if abs(amps[i]) > 1e-12}
        assert nonzero == {0b0000, 0b1110, 0b0011, 0b1101}
        assert np.allclose(amps[list(nonzero)], 0.5)


class TestGhzLike:
    def test_distinct_branches_required(self):
        with pytest.raises(ValidationError):
            GhzLikeSpec(BellLabel.PSI_PLUS, BellLabel.PSI_PLUS)

    def test_default_state(self):
        amps = ghz_like(GhzLikeSpec()).amplitudes
        # (|psi+>|0> + |phi+>|1>)/√2
        expected = np.zeros(8)
        expected[[0b000, 0b110]] = 0.5
        expected[[0b011, 0b101]] = 0.5
        assert np.allclose(amps, expected)

    @pytest.mark.parametrize("basis", list(ControllerBasis))
    def test_branch_labels(self, basis):
        spec = GhzLikeSpec(BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, basis)
        state = ghz_like(spec)
        for bit, ket in enumerate(basis.kets):
            # project the controller onto ket and check the Bell pair left behind
            proj = np.kron(np.eye(4), ket.amplitudes.conj()).reshape(4, 8)
            rest = proj @ state.amplitudes
            rest = rest / np.linalg.norm(rest)
            assert identify_bell(type(state)(rest)) is spec.branch_label(bit)

    def test_diagonal_controller_kets(self):
        assert ControllerBasis.DIAGONAL.kets == (PLUS, MINUS)
        assert ControllerBasis.COMPUTATIONAL.kets == (ZERO, ONE)


def test_voter_op_on_ghz_like_flips_branch_labels():
    state = apply_unitary(ghz_like(GhzLikeSpec()), PauliOp.Z.matrix, [0])
    expected = ghz_like(GhzLikeSpec(BellLabel.PSI_MINUS, BellLabel.PHI_MINUS))
    assert equal_up_to_global_phase(state, expected)
