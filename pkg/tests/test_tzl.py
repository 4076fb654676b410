import numpy as np
import pytest

from qvote.decoy import EavesdropperModel
from qvote.errors import AuthenticationError, TamperSignal, ValidationError
from qvote.qstate import MINUS, PLUS, equal_up_to_global_phase, random_state, relative_phase
from qvote.states import GhzLabel, PauliOp, Sign
from qvote.transcript import secret_leaks
from qvote.tzl import (
    CORRECTION_TABLE,
    LEGS,
    TZL_RULES,
    CertificateAuthority,
    TzlCorrectionKey,
    TzlElection,
    VotingRule,
    correction_for,
    run_tzl_voting,
    tzl_controlled_teleport,
    tzl_teleport_branches,
)

P, M = Sign.PLUS, Sign.MINUS


class TestCorrectionTable:
    def test_eight_rows(self):
        assert len(CORRECTION_TABLE) == 8

    def test_invalid_key(self):
        with pytest.raises(ValidationError):
            TzlCorrectionKey(GhzLabel(1, P), 0)

    def test_lookup(self):
        assert correction_for(TzlCorrectionKey(GhzLabel(3, M), 0)) is PauliOp.IY


class TestTeleportation:
    @pytest.mark.parametrize("state", [PLUS, MINUS])
    def test_branch_support(self, state):
        branches = tzl_teleport_branches(state)
        assert len(branches) == 8
        assert {b.alice_outcome.a for b in branches} == {0, 3}
        assert abs(sum(b.probability for b in branches) - 1) < 1e-12
        for b in branches:
            assert abs(b.probability - 0.125) < 1e-12
            assert equal_up_to_global_phase(b.bob_after, state)

    def test_minus_phase_entries(self):
        # two branches leave Bob with -|-> before correction
        rows = {(b.alice_outcome, b.charlie_outcome): b for b in tzl_teleport_branches(MINUS)}
        phases = {k: relative_phase(MINUS, r.bob_before) for k, r in rows.items() if equal_up_to_global_phase(r.bob_before, MINUS)}
        assert any(np.isclose(p, -1) for p in phases.values())

    def test_random_inputs(self, rng):
        for _ in range(20):
            psi = random_state(rng, 1)
            for b in tzl_teleport_branches(psi):
                assert abs(abs(psi.inner(b.bob_after)) ** 2 - 1) < 1e-9

    def test_sampled_run(self, rng):
        psi = random_state(rng, 1)
        rec = tzl_controlled_teleport(psi, rng)
        assert rec.alice_outcome.a in (0, 3)
        assert equal_up_to_global_phase(rec.bob_state, psi)

    def test_multi_qubit_input_rejected(self, rng):
        from qvote.qstate import StateVector

        with pytest.raises(ValidationError):
            tzl_controlled_teleport(StateVector.from_bits("00"), rng)


class TestVotingRule:
    def test_round_trip(self):
        rule = VotingRule(PauliOp.Z, PauliOp.I)
        assert VotingRule.from_payload(rule.to_payload()) == rule
        assert rule.vote_for(rule.op_for(1)) == 1

    def test_same_ops_rejected(self):
        with pytest.raises(ValidationError):
            VotingRule(PauliOp.I, PauliOp.I)

    def test_tamper_signal(self):
        with pytest.raises(TamperSignal):
            TZL_RULES[0].vote_for(PauliOp.X)


class TestElection:
    @pytest.mark.parametrize("charlie_prepares", [False, True])
    def test_tally(self, rng, charlie_prepares):
        votes = [int(v) for v in rng.integers(0, 2, size=12)]
        transcript, tally = run_tzl_voting(votes, rng, charlie_prepares=charlie_prepares)
        assert tally == sum(votes)
        transcript.validate()

    def test_explicit_rules(self, rng):
        votes = [1, 0, 1, 0]
        rules = [TZL_RULES[0], TZL_RULES[1], TZL_RULES[1], TZL_RULES[0]]
        election = TzlElection(votes, rng, rules)
        _, tally = election.run()
        assert tally == 2
        assert [r.decoded for r in election.rounds] == votes

    def test_rules_stay_secret_until_counting(self, rng):
        transcript, _ = run_tzl_voting([1, 0, 1], rng)
        assert secret_leaks(transcript) == []
        disclosed = [r for r in transcript.select(action="disclose") if "rule" in r.payload]
        assert disclosed and all(r.phase == "counting" for r in disclosed)

    def test_authentication_failure(self, rng):
        with pytest.raises(AuthenticationError):
            run_tzl_voting([1, 0], rng, authority=CertificateAuthority(["Voter2"]))

    def test_bad_votes(self, rng):
        with pytest.raises(ValidationError):
            run_tzl_voting([2], rng)

    def test_decoy_protection_catches_eavesdropper(self, rng):
        model = EavesdropperModel.intercept_resend("channel-voter")
        transcript, _ = run_tzl_voting([1] * 20, rng, decoys_per_qubit=3, adversary=model)
        assert len(transcript.select(action="abort")) > 10

    def test_legs(self):
        assert "plus-qubit" in LEGS and "channel-voter" in LEGS


def test_empty_election(rng):
    transcript, tally = run_tzl_voting([], rng)
    assert tally == 0
    assert not transcript.select(action="prepare")
