import numpy as np
import pytest

from qvote.attacks import (
    CHARLIE_FREE_CORRECTION,
    Attacker,
    TargetLeg,
    bob_reduced_states,
    charlie_irrelevance,
    eve_replace_attack,
    mutual_information,
    no_controller_attack,
    replace_attack_on_decoys,
    separable_attack,
)
from qvote.errors import ContractError, ValidationError
from qvote.qstate import MINUS, PLUS, ZERO, StateVector, purity


def votes(rng, n):
    return [int(v) for v in rng.integers(0, 2, size=n)]


class TestCharlieIrrelevance:
    @pytest.mark.parametrize("state", [PLUS, MINUS])
    def test_pure_and_recoverable(self, state):
        report = charlie_irrelevance(state)
        assert set(report.entries) == set(CHARLIE_FREE_CORRECTION)
        for entry in report.entries.values():
            assert abs(entry.purity - 1) < 1e-9
            assert abs(entry.recovered_fidelity - 1) < 1e-9
            assert entry.charlie_free_correction is CHARLIE_FREE_CORRECTION[entry.alice_outcome]

    def test_other_inputs_rejected(self):
        y_plus = StateVector([1, 1j], normalize=True)
        with pytest.raises(ValidationError, match="purity"):
            charlie_irrelevance(y_plus)

    def test_generic_input_needs_charlie(self):
        for p, rho, _ in bob_reduced_states(ZERO).values():
            assert purity(rho) < 1 - 1e-6


class TestMutualInformation:
    def test_independent(self, rng):
        xs, ys = votes(rng, 5000), votes(rng, 5000)
        assert mutual_information(xs, ys) < 0.01

    def test_identical(self):
        xs = [0, 1] * 50
        assert abs(mutual_information(xs, xs) - 1) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            mutual_information([0], [0, 1])


class TestBobAttacks:
    def test_separable(self, rng):
        out = separable_attack(votes(rng, 300), rng)
        assert out.attacker is Attacker.BOB_SEPARABLE
        assert out.success_rate == 1.0 and out.detection_rate == 0.0
        assert out.details["charlie_matches_prep"] == 1.0
        assert out.details["mutual_information_bits"] < 0.05

    @pytest.mark.parametrize("charlie_prepares", [False, True])
    def test_no_controller(self, rng, charlie_prepares):
        out = no_controller_attack(votes(rng, 200), rng, charlie_prepares=charlie_prepares)
        assert out.success_rate == 1.0 and out.detection_rate == 0.0


class TestEveReplace:
    def test_channel_takeover_fixes_the_vote(self, rng):
        out = eve_replace_attack(TargetLeg.CHANNEL_QUBITS, 0, rng, trials=200)
        assert out.success_rate == 1.0 and out.detection_rate == 0.0

    def test_plus_qubit_replacement_only_adds_a_bit(self, rng):
        out = eve_replace_attack(TargetLeg.PLUS_QUBIT, 1, rng, trials=2000)
        assert abs(out.success_rate - 0.5) < 4 * np.sqrt(0.25 / 2000)
        assert out.detection_rate == 0.0

    def test_decoys_violate_contract(self, rng):
        with pytest.raises(ContractError):
            eve_replace_attack(TargetLeg.PLUS_QUBIT, 1, rng, trials=1, decoys_per_qubit=1)

    def test_bad_vote(self, rng):
        with pytest.raises(ValidationError):
            eve_replace_attack(TargetLeg.PLUS_QUBIT, 2, rng, trials=1)

    @pytest.mark.parametrize("protocol", ["cdsqc1", "cdsqc2"])
    def test_decoys_expose_replacement(self, rng, protocol):
        out = replace_attack_on_decoys(protocol, rng, trials=400)
        tested = out.details["decoys_tested"]
        assert abs(out.detection_rate - 0.5) < 4 * np.sqrt(0.25 / tested)

    def test_unknown_protocol(self, rng):
        with pytest.raises(ValidationError):
            replace_attack_on_decoys("bb84", rng, trials=1)


@pytest.mark.parametrize("state", [PLUS, MINUS])
def test_charlie_outcome_leaves_bob_unchanged(state):
    from qvote.qstate import trace_distance

    for _, _, conditional in bob_reduced_states(state).values():
        assert trace_distance(conditional[0], conditional[1]) < 1e-9
