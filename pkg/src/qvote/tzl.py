"""TZL controlled teleportation and the TZL voting phase.

Qubit roles in the four-qubit channel are (A1, A2, B, C): the voter holds
A1 and A2, the tallyman Bob holds B and the controller Charlie holds C. The
voter's GHZ measurement acts on (encoded qubit, A1, A2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qvote.decoy import DEFAULT_THRESHOLD, EavesdropperModel, protected_transfer
from qvote.errors import AuthenticationError, ConsistencyError, TamperSignal, ValidationError
from qvote.qstate import (
    PLUS,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    branches,
    tensor,
)
from qvote.states import GhzLabel, PauliOp, Sign, ghz_basis, tzl_channel
from qvote.system import QubitSystem
from qvote.transcript import BulletinBoard, ProtocolTranscript

_P, _M = Sign.PLUS, Sign.MINUS

CORRECTION_TABLE: dict[tuple[GhzLabel, int], PauliOp] = {
    (GhzLabel(0, _P), 0): PauliOp.I,
    (GhzLabel(0, _P), 1): PauliOp.X,
    (GhzLabel(0, _M), 0): PauliOp.Z,
    (GhzLabel(0, _M), 1): PauliOp.IY,
    (GhzLabel(3, _P), 0): PauliOp.X,
    (GhzLabel(3, _P), 1): PauliOp.I,
    (GhzLabel(3, _M), 0): PauliOp.IY,
    (GhzLabel(3, _M), 1): PauliOp.Z,
}

# bits charged per announcement (tallyman's decoding needs)
ALICE_OUTCOME_BITS = 3
CHARLIE_OUTCOME_BITS = 1
RULE_BITS = 1

LEGS = ("plus-qubit", "channel-voter", "channel-charlie", "channel-bob")


@dataclass(frozen=True)
class TzlCorrectionKey:
    alice_outcome: GhzLabel
    charlie_outcome: int

    def __post_init__(self):
        if (self.alice_outcome, self.charlie_outcome) not in CORRECTION_TABLE:
            raise ValidationError(
                f"({self.alice_outcome}, {self.charlie_outcome}) never occurs in the TZL channel"
            )


def correction_for(key: TzlCorrectionKey) -> PauliOp:
    return CORRECTION_TABLE[(key.alice_outcome, key.charlie_outcome)]


@dataclass(frozen=True)
class VotingRule:
    """Which operator encodes "yes" (vote 1) and which encodes "no" (vote 0)."""

    yes_op: PauliOp
    no_op: PauliOp

    def __post_init__(self):
        if self.yes_op == self.no_op:
            raise ValidationError("yes and no must use different operators")

    def op_for(self, vote: int) -> PauliOp:
        return self.yes_op if vote else self.no_op

    def vote_for(self, op: PauliOp) -> int:
        if op == self.yes_op:
            return 1
        if op == self.no_op:
            return 0
        raise TamperSignal(f"operator {op} is outside the rule pair ({self.yes_op}, {self.no_op})", op)

    def to_payload(self) -> dict:
        return {"yes": self.yes_op.value, "no": self.no_op.value}

    @classmethod
    def from_payload(cls, d: dict) -> "VotingRule":
        return cls(PauliOp(d["yes"]), PauliOp(d["no"]))


TZL_RULES = (VotingRule(PauliOp.I, PauliOp.Z), VotingRule(PauliOp.Z, PauliOp.I))


@dataclass(frozen=True)
class TeleportBranch:
    alice_outcome: GhzLabel
    charlie_outcome: int
    probability: float
    bob_before: StateVector
    correction: PauliOp
    bob_after: StateVector


@dataclass(frozen=True)
class TeleportRecord:
    alice_outcome: GhzLabel
    charlie_outcome: int
    correction: PauliOp
    bob_state: StateVector
    bob_before: StateVector


def tzl_teleport_branches(state: StateVector) -> list[TeleportBranch]:
    """All nonzero (Alice, Charlie) branches of the controlled teleportation."""
    if state.num_qubits != 1:
        raise ValidationError("TZL teleports a single qubit")
    joint = tensor(state, tzl_channel())  # (T, A1, A2, B, C)
    out = []
    for alice in branches(joint, ghz_basis(), [0, 1, 2]):
        if alice.residual is None:
            continue
        # residual is (B, C)
        for charlie in branches(alice.residual, MeasurementBasis.computational(1), [1]):
            if charlie.residual is None:
                continue
            label = GhzLabel.parse(alice.label)
            c = int(charlie.label)
            op = correction_for(TzlCorrectionKey(label, c))
            after = apply_unitary(charlie.residual, op.matrix, [0])
            out.append(TeleportBranch(label, c, alice.probability * charlie.probability, charlie.residual, op, after))
    return out


def tzl_controlled_teleport(state: StateVector, rng: np.random.Generator) -> TeleportRecord:
    """Teleport ``state`` once with sampled measurement outcomes."""
    if state.num_qubits != 1:
        raise ValidationError("TZL teleports a single qubit")
    system = QubitSystem()
    t = system.prepare_one(state)
    a1, a2, b, c = system.prepare(tzl_channel())
    alice = GhzLabel.parse(system.measure(ghz_basis(), [t, a1, a2], rng))
    charlie = int(system.measure(MeasurementBasis.computational(1), [c], rng))
    before = system.state_of([b])
    op = correction_for(TzlCorrectionKey(alice, charlie))
    system.apply(op.matrix, [b])
    return TeleportRecord(alice, charlie, op, system.state_of([b]), before)


class CertificateAuthority:
    """Trusted authentication oracle standing in for quantum-ID checks."""

    def __init__(self, rejected: Sequence[str] = ()):
        self.rejected = frozenset(rejected)

    def authenticate(self, party: str) -> bool:
        return party not in self.rejected


def voter_name(i: int) -> str:
    return f"Voter{i + 1}"


@dataclass
class TzlRound:
    voter: str
    cast_vote: int
    rule: VotingRule
    alice_outcome: GhzLabel | None = None
    charlie_outcome: int | None = None
    correction: PauliOp | None = None
    broadcast: str | None = None
    decoded: int | None = None
    aborted: bool = False
    qubits: dict = field(default_factory=dict)

    @property
    def broadcast_bit(self) -> int | None:
        """Bob's announced diagonal outcome as a bit: |+> is 0, |-> is 1."""
        return None if self.broadcast is None else int(self.broadcast == "-")


class TzlElection:
    """One run of the TZL voting phase followed by the counting phase.

    Subclasses override :meth:`prepare_channel` or :meth:`voter_station`
    to model dishonest parties.
    """

    protocol = "tzl"

    def __init__(
        self,
        votes: Sequence[int],
        rng: np.random.Generator,
        rules: Sequence[VotingRule] | None = None,
        *,
        charlie_prepares: bool = False,
        decoys_per_qubit: int = 0,
        adversary: EavesdropperModel | None = None,
        threshold: float = DEFAULT_THRESHOLD,
        authority: CertificateAuthority | None = None,
    ):
        self.votes = [int(v) for v in votes]
        if any(v not in (0, 1) for v in self.votes):
            raise ValidationError("votes must be bits")
        if rules is not None and len(rules) != len(self.votes):
            raise ValidationError("one voting rule per voter is required")
        self.rng = rng
        self.rules = list(rules) if rules is not None else None
        self.charlie_prepares = charlie_prepares
        self.decoys_per_qubit = decoys_per_qubit
        self.adversary = adversary
        self.threshold = threshold
        self.authority = authority or CertificateAuthority()
        self.system = QubitSystem()
        self.transcript = ProtocolTranscript()
        self.board = BulletinBoard(self.transcript)
        self.rounds: list[TzlRound] = []
        self.honest = True

    @property
    def channel_preparer(self) -> str:
        return "Charlie" if self.charlie_prepares else "Bob"

    def run(self) -> tuple[ProtocolTranscript, int]:
        self.transcript.log(
            "initial",
            "Charlie",
            "setup",
            {
                "protocol": "tzl-charlie-prep" if self.charlie_prepares else self.protocol,
                "n_voters": len(self.votes),
                "decoys_per_qubit": self.decoys_per_qubit,
            },
        )
        self.board.post("voting", "Charlie", {"bulletin_board": "open"}, 0)
        for i, vote in enumerate(self.votes):
            self.rounds.append(self.voter_round(i, vote))
        return self.transcript, self.count()

    def _authenticate(self, name: str) -> None:
        for checker in ("Bob", "Charlie"):
            ok = self.authority.authenticate(name)
            self.transcript.log("voting", checker, "authenticate", {"party": name, "accepted": ok})
            if not ok:
                raise AuthenticationError(f"CA rejected {name}")

    def _send(self, leg: str, sender: str, receiver: str, qubits: list[int]) -> list[int] | None:
        received, _ = protected_transfer(
            self.system,
            self.transcript,
            self.rng,
            leg=leg,
            sender=sender,
            receiver=receiver,
            qubits=qubits,
            decoys_per_qubit=self.decoys_per_qubit,
            adversary=self.adversary,
            threshold=self.threshold,
        )
        return received

    def prepare_channel(self) -> StateVector:
        return tzl_channel()

    def voter_round(self, i: int, vote: int) -> TzlRound:
        name = voter_name(i)
        self._authenticate(name)
        rule = self.rules[i] if self.rules is not None else TZL_RULES[int(self.rng.integers(2))]
        rnd = TzlRound(name, vote, rule)
        log = self.transcript.log

        # Bob hands the voter a |+> qubit
        t = self.system.prepare_one(PLUS)
        log("voting", "Bob", "prepare", {"what": "plus", "for": name, "qubits": 1}, dq=1)
        got = self._send("plus-qubit", "Bob", name, [t])
        if got is None:
            return self._abort(rnd, "plus-qubit")
        t = got[0]

        # rule travels over an encrypted channel; the payload stays private
        log("voting", "Charlie", "disclose", {"to": name, "channel": "bb84-encrypted"}, db=RULE_BITS)

        # channel distribution
        preparer = self.channel_preparer
        a1, a2, b, c = self.system.prepare(self.prepare_channel())
        log("voting", preparer, "prepare", {"what": "tzl-channel", "for": name, "qubits": 4}, dq=4)
        rnd.qubits = {"T": t, "A1": a1, "A2": a2, "B": b, "C": c}
        got = self._send("channel-voter", preparer, name, [a1, a2])
        if got is None:
            return self._abort(rnd, "channel-voter")
        a1, a2 = got
        if self.charlie_prepares:
            got = self._send("channel-bob", "Charlie", "Bob", [b])
            if got is None:
                return self._abort(rnd, "channel-bob")
            b = got[0]
        else:
            got = self._send("channel-charlie", "Bob", "Charlie", [c])
            if got is None:
                return self._abort(rnd, "channel-charlie")
            c = got[0]

        # voter and Charlie measure
        rnd.alice_outcome = self.voter_station(rnd, t, a1, a2)
        rnd.charlie_outcome = int(self.system.measure(MeasurementBasis.computational(1), [c], self.rng))
        self.board.post("voting", "Charlie", {"voter": name, "outcome": rnd.charlie_outcome}, CHARLIE_OUTCOME_BITS)

        if rnd.alice_outcome.a not in (0, 3):
            # the genuine channel never yields GHZ1 or GHZ2, so the announcement proves tampering
            log("voting", "Bob", "abort", {"voter": name, "reason": f"outcome {rnd.alice_outcome} outside channel support"})
            return self._abort(rnd, "channel-voter")

        # Bob corrects and broadcasts his diagonal outcome
        rnd.correction = self.bob_correction(rnd)
        self.system.apply(rnd.correction.matrix, [b])
        log("voting", "Bob", "apply", {"voter": name, "op": rnd.correction.value})
        rnd.broadcast = self.system.measure(MeasurementBasis.diagonal(), [b], self.rng)
        self.board.post("voting", "Bob", {"voter": name, "outcome": rnd.broadcast, "bit": rnd.broadcast_bit}, 0)
        return rnd

    def voter_station(self, rnd: TzlRound, t: int, a1: int, a2: int) -> GhzLabel:
        """Encode the vote on ``t``, GHZ-measure (t, a1, a2) and announce the outcome."""
        op = rnd.rule.op_for(rnd.cast_vote)
        self.system.apply(op.matrix, [t])
        self.transcript.log("voting", rnd.voter, "apply", {"qubit": "encoded"})
        label = GhzLabel.parse(self.system.measure(ghz_basis(), [t, a1, a2], self.rng))
        self.board.post("voting", rnd.voter, {"outcome": str(label)}, ALICE_OUTCOME_BITS)
        return label

    def bob_correction(self, rnd: TzlRound) -> PauliOp:
        return correction_for(TzlCorrectionKey(rnd.alice_outcome, rnd.charlie_outcome))

    def _abort(self, rnd: TzlRound, leg: str) -> TzlRound:
        rnd.aborted = True
        return rnd

    def decode(self, rnd: TzlRound) -> int | None:
        op = PauliOp.I if rnd.broadcast == "+" else PauliOp.Z
        try:
            return rnd.rule.vote_for(op)
        except TamperSignal:
            return None

    def count(self) -> int:
        log = self.transcript.log
        log("counting", "Charlie", "marker", {"phase": "counting"})
        for rnd in self.rounds:
            if rnd.aborted:
                continue
            log("counting", "Charlie", "disclose", {"voter": rnd.voter, "rule": rnd.rule.to_payload()}, db=RULE_BITS)
            rnd.decoded = self.decode(rnd)
            log("counting", "Bob", "decode", {"voter": rnd.voter, "vote": rnd.decoded}, dc=int(rnd.decoded is not None))
        tally = sum(r.decoded for r in self.rounds if r.decoded is not None)
        recount = sum(r.payload["vote"] or 0 for r in self.transcript.select(action="decode"))
        if recount != tally:
            raise ConsistencyError(f"tally {tally} disagrees with decoded records ({recount})")
        if self.honest and self.adversary is None:
            for r in self.rounds:
                if not r.aborted and r.decoded != r.cast_vote:
                    raise ConsistencyError(f"{r.voter}: decoded {r.decoded} but cast {r.cast_vote}")
        self.board.post("counting", "Bob", {"tally": tally}, 0)
        return tally


def run_tzl_voting(
    votes: Sequence[int],
    rng: np.random.Generator,
    rules: Sequence[VotingRule] | None = None,
    **options,
) -> tuple[ProtocolTranscript, int]:
    """Run the TZL voting and counting phases; see :class:`TzlElection` for options."""
    return TzlElection(votes, rng, rules, **options).run()
