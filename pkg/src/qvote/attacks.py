"""Executable demonstrations of the weaknesses of the TZL voting protocol.

* :func:`charlie_irrelevance` shows that, for |+> and |-> inputs, Bob's qubit
  is already pure once Alice announces, so Charlie's outcome is not needed.
* :func:`no_controller_attack` uses that fact inside a full election.
* :func:`separable_attack` lets Bob hand out GHZ0+ ⊗ |r> instead of the
  entangled channel, which decouples Charlie completely.
* :func:`eve_replace_attack` substitutes qubits on the unprotected legs.

A note on the replacement attack. Bob keeps qubit B and corrects it using
the voter's public GHZ announcement. Whatever Eve does to the legs, Alice's
encoding Z^t anticommutes with the XXX parity read out by the GHZ
measurement, so replacing the |+> qubit lets Eve add a bit to the vote
but never overwrite it. To fix the outcome Eve has to take the channel
qubits A1, A2 on the channel leg and also speak for the voter on the
bulletin board (nothing there is authenticated in TZL). Both strategies are
implemented and measured honestly.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qvote.decoy import DecoyState, EavesdropperModel
from qvote.errors import ContractError, ValidationError
from qvote.qstate import (
    MINUS,
    ONE,
    PLUS,
    ZERO,
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    branches,
    equal_up_to_global_phase,
    fidelity_pure,
    partial_trace,
    purity,
    tensor,
    to_density,
)
from qvote.states import GHZ_LABELS, GhzLabel, PauliOp, Sign, ghz, ghz_basis, tzl_channel
from qvote.tzl import TzlElection, TzlRound, VotingRule

_P, _M = Sign.PLUS, Sign.MINUS

# Bob's correction for |±> inputs when he ignores Charlie
CHARLIE_FREE_CORRECTION = {
    GhzLabel(0, _P): PauliOp.I,
    GhzLabel(3, _P): PauliOp.I,
    GhzLabel(3, _M): PauliOp.Z,
    GhzLabel(0, _M): PauliOp.Z,
}

# Teleportation correction through a plain GHZ0+ channel on (A1, A2, B)
GHZ_CHANNEL_CORRECTION = {
    GhzLabel(0, _P): PauliOp.I,
    GhzLabel(0, _M): PauliOp.Z,
    GhzLabel(3, _P): PauliOp.X,
    GhzLabel(3, _M): PauliOp.IY,
}


class Attacker(enum.Enum):
    BOB_SEPARABLE = "bob-separable"
    BOB_NO_CONTROLLER = "bob-no-controller"
    EVE_REPLACE = "eve-replace"


class TargetLeg(enum.Enum):
    PLUS_QUBIT = "plus-qubit"
    CHANNEL_QUBITS = "channel-voter"


@dataclass(frozen=True)
class IrrelevanceEntry:
    alice_outcome: GhzLabel
    probability: float
    bob_reduced_state: DensityMatrix
    purity: float
    charlie_free_correction: PauliOp
    recovered_fidelity: float


@dataclass(frozen=True)
class IrrelevanceReport:
    input_state: StateVector
    entries: dict[GhzLabel, IrrelevanceEntry]


@dataclass
class AttackOutcome:
    attacker: Attacker
    success_rate: float
    detection_rate: float
    trials: int
    details: dict = field(default_factory=dict)


def bob_reduced_states(state: StateVector) -> dict[GhzLabel, tuple[float, DensityMatrix, dict[int, DensityMatrix]]]:
    """Bob's qubit after each nonzero Alice outcome.

    Maps the outcome to (probability, state with Charlie traced out, state
    conditioned on each Charlie outcome).
    """
    joint = tensor(state, tzl_channel())
    out = {}
    for alice in branches(joint, ghz_basis(), [0, 1, 2]):
        if alice.residual is None:
            continue
        bc = alice.residual  # (B, C)
        traced = partial_trace(to_density(bc), [0])
        conditional = {
            int(r.label): to_density(r.residual)
            for r in branches(bc, MeasurementBasis.computational(1), [1])
            if r.residual is not None
        }
        out[GhzLabel.parse(alice.label)] = (alice.probability, traced, conditional)
    return out


def _conjugate(rho: DensityMatrix, op: PauliOp) -> DensityMatrix:
    m = op.matrix
    return DensityMatrix(m @ rho.entries @ m.conj().T)


def charlie_irrelevance(state: StateVector) -> IrrelevanceReport:
    """Show Bob recovers a |±> input from Alice's announcement alone."""
    reduced = bob_reduced_states(state)
    worst = min(purity(rho) for _, rho, _ in reduced.values())
    if not (equal_up_to_global_phase(state, PLUS) or equal_up_to_global_phase(state, MINUS)):
        raise ValidationError(
            f"controller irrelevance holds only for |+> and |->; Bob's reduced state has purity {worst:.6f}"
        )
    entries = {}
    for label, (p, rho, _) in reduced.items():
        op = CHARLIE_FREE_CORRECTION[label]
        entries[label] = IrrelevanceEntry(label, p, rho, purity(rho), op, fidelity_pure(_conjugate(rho, op), state))
    return IrrelevanceReport(state, entries)


def mutual_information(xs: Sequence, ys: Sequence) -> float:
    """Plug-in estimate of I(X;Y) in bits from paired samples."""
    n = len(xs)
    if n != len(ys):
        raise ValidationError("samples must be paired")
    if n == 0:
        return 0.0
    joint = Counter(zip(xs, ys))
    px, py = Counter(xs), Counter(ys)
    return sum(c / n * math.log2(c * n / (px[x] * py[y])) for (x, y), c in joint.items())


def _random_votes(rng, n):
    return [int(v) for v in rng.integers(0, 2, size=n)]


class _SeparableChannelElection(TzlElection):
    """Bob distributes GHZ0+ on (A1, A2, B) with Charlie's qubit left separable."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.honest = False
        self.prep_bits: list[int] = []

    def prepare_channel(self) -> StateVector:
        bit = int(self.rng.integers(2))
        self.prep_bits.append(bit)
        return tensor(ghz(GhzLabel(0, _P)), ONE if bit else ZERO)

    def bob_correction(self, rnd: TzlRound) -> PauliOp:
        return GHZ_CHANNEL_CORRECTION[rnd.alice_outcome]


def _suspicious(rnd: TzlRound) -> bool:
    # the only public evidence available: an Alice outcome the TZL channel never produces
    return rnd.alice_outcome is not None and rnd.alice_outcome.a not in (0, 3)


def separable_attack(votes: Sequence[int], rng: np.random.Generator) -> AttackOutcome:
    election = _SeparableChannelElection(votes, rng)
    transcript, tally = election.run()
    rounds = election.rounds
    charlie = [r.charlie_outcome for r in rounds]
    decoded = [r.decoded for r in rounds]
    n = len(rounds)
    return AttackOutcome(
        Attacker.BOB_SEPARABLE,
        success_rate=sum(r.decoded == r.cast_vote for r in rounds) / n if n else 1.0,
        detection_rate=sum(map(_suspicious, rounds)) / n if n else 0.0,
        trials=n,
        details={
            "charlie_outcomes": charlie,
            "prep_bits": list(election.prep_bits),
            "charlie_matches_prep": sum(c == b for c, b in zip(charlie, election.prep_bits)) / n if n else 1.0,
            "mutual_information_bits": mutual_information(charlie, decoded),
            "tally": tally,
            "transcript": transcript,
        },
    )


class _NoControllerElection(TzlElection):
    """Honest channel, but Bob corrects from Alice's announcement only."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.honest = False

    def bob_correction(self, rnd: TzlRound) -> PauliOp:
        return CHARLIE_FREE_CORRECTION[rnd.alice_outcome]


def no_controller_attack(votes: Sequence[int], rng: np.random.Generator, *, charlie_prepares: bool = False) -> AttackOutcome:
    """Bob decodes without ever using Charlie's outcome.

    With ``charlie_prepares=True`` the channel comes from Charlie, which does
    not restore his control.
    """
    election = _NoControllerElection(votes, rng, charlie_prepares=charlie_prepares)
    transcript, tally = election.run()
    rounds = election.rounds
    n = len(rounds)
    return AttackOutcome(
        Attacker.BOB_NO_CONTROLLER,
        success_rate=sum(r.decoded == r.cast_vote for r in rounds) / n if n else 1.0,
        detection_rate=sum(map(_suspicious, rounds)) / n if n else 0.0,
        trials=n,
        details={"charlie_prepares": charlie_prepares, "tally": tally, "transcript": transcript},
    )


class _ReplacingEveElection(TzlElection):
    def __init__(self, votes, rng, target: TargetLeg, eve_vote: int, **kwargs):
        super().__init__(votes, rng, **kwargs)
        self.honest = False
        self.target = target
        self.eve_vote = eve_vote
        self._genuine: dict[str, list[int]] = {}

    def _eve_state(self) -> StateVector:
        return MINUS if self.eve_vote else PLUS

    def _send(self, leg, sender, receiver, qubits):
        if leg != self.target.value:
            return super()._send(leg, sender, receiver, qubits)
        for slot in range(len(qubits)):
            self.transcript.log("voting", sender, "transmit-qubit", {"leg": leg, "to": receiver, "slot": slot})
        self._genuine[receiver] = list(qubits)
        if self.target is TargetLeg.PLUS_QUBIT:
            fakes = [self.system.prepare_one(self._eve_state())]
        else:
            fakes = [self.system.prepare_one(ZERO) for _ in qubits]
        self.transcript.log("voting", "Eve", "attack", {"leg": leg, "model": {"kind": "replace", "kept": len(qubits)}})
        return fakes

    def voter_station(self, rnd, t, a1, a2):
        if self.target is TargetLeg.PLUS_QUBIT:
            return super().voter_station(rnd, t, a1, a2)
        # voter works on Eve's auxiliary qubits; her announcement never reaches the board
        self.system.apply(rnd.rule.op_for(rnd.cast_vote).matrix, [t])
        self.transcript.log("voting", rnd.voter, "apply", {"qubit": "encoded"})
        self.system.measure(ghz_basis(), [t, a1, a2], self.rng)
        real_a1, real_a2 = self._genuine[rnd.voter]
        e = self.system.prepare_one(self._eve_state())
        label = GhzLabel.parse(self.system.measure(ghz_basis(), [e, real_a1, real_a2], self.rng))
        self.transcript.log("voting", "Eve", "attack", {"leg": "bulletin-board", "model": {"kind": "impersonate", "voter": rnd.voter}})
        self.board.post("voting", rnd.voter, {"outcome": str(label)}, 3)
        return label


def eve_replace_attack(
    target_leg: TargetLeg,
    eve_vote: int,
    rng: np.random.Generator,
    trials: int = 1000,
    *,
    decoys_per_qubit: int = 0,
) -> AttackOutcome:
    """Eve replaces qubits on an unprotected TZL leg; one trial is one voter.

    Success means Bob's announced diagonal bit (|+> -> 0, |-> -> 1) equals
    ``eve_vote``. Voters vote at random under random TZL rules.
    """
    if decoys_per_qubit:
        raise ContractError("leg is decoy-protected; use decoy.EavesdropperModel adversaries there")
    if eve_vote not in (0, 1):
        raise ValidationError("eve_vote must be a bit")
    votes = _random_votes(rng, trials)
    election = _ReplacingEveElection(votes, rng, target_leg, eve_vote)
    transcript, _ = election.run()
    rounds = election.rounds
    aborted = sum(r.aborted for r in rounds)
    return AttackOutcome(
        Attacker.EVE_REPLACE,
        success_rate=sum(r.broadcast_bit == eve_vote for r in rounds) / trials if trials else 1.0,
        detection_rate=aborted / trials if trials else 0.0,
        trials=trials,
        details={
            "target_leg": target_leg.value,
            "announced_bits": [r.broadcast_bit for r in rounds],
            "decoded_votes": [r.decoded for r in rounds],
            "cast_votes": votes,
            "transcript": transcript,
        },
    )


def replace_attack_on_decoys(protocol: str, rng: np.random.Generator, trials: int = 1000, leg: str = "voter->bob") -> AttackOutcome:
    """Replay fixed-state replacement against a decoy-protected CDSQC leg.

    ``detection_rate`` is the per-decoy error rate seen by the BB84 check;
    ``success_rate`` is the fraction of attacked transfers that passed it.
    """
    from qvote import cdsqc

    model = EavesdropperModel.replace_fixed(DecoyState.ZERO, leg)
    votes = _random_votes(rng, trials)
    if protocol == "cdsqc1":
        transcript, _ = cdsqc.protocol1_run(cdsqc.Protocol1Config(n_voters=trials), votes, rng, adversary=model)
    elif protocol == "cdsqc2":
        transcript, _ = cdsqc.protocol2_run(cdsqc.Protocol2Config(n_voters=trials), votes, rng, adversary=model)
    else:
        raise ValidationError(f"unknown protocol {protocol!r}")
    checks = [r.payload for r in transcript.select(action="check") if r.payload["leg"] == leg]
    tested = sum(c["tested"] for c in checks)
    errors = sum(c["errors"] for c in checks)
    aborted = sum(1 for r in transcript.select(action="abort") if r.payload["leg"] == leg)
    return AttackOutcome(
        Attacker.EVE_REPLACE,
        success_rate=1.0 - aborted / len(checks) if checks else 0.0,
        detection_rate=errors / tested if tested else 0.0,
        trials=trials,
        details={
            "protocol": protocol,
            "leg": leg,
            "decoys_tested": tested,
            "decoy_errors": errors,
            "aborted_votes": aborted,
            "transcript": transcript,
        },
    )
