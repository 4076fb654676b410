"""Voting over controlled deterministic secure quantum communication.

Protocol 1 distributes a GHZ-like state per voter; Charlie's measurement of
his qubit tells Bob which Bell state the voter and Bob share.

Protocol 2 uses one Bell pair per voter and hides the pairing with a secret
permutation of Bob's half of the pairs until the counting phase.

Every quantum leg is decoy-protected; see :mod:`qvote.decoy`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qvote.decoy import DEFAULT_THRESHOLD, EavesdropperModel, protected_transfer
from qvote.errors import AuthenticationError, ConsistencyError, TamperSignal, ValidationError
from qvote.qstate import outcome_distribution, apply_unitary
from qvote.states import (
    BellLabel,
    GhzLikeSpec,
    PauliOp,
    bell,
    bell_basis,
    bell_transition_inverse,
    ghz_like,
)
from qvote.system import QubitSystem
from qvote.transcript import BulletinBoard, ProtocolTranscript
from qvote.tzl import CertificateAuthority, VotingRule, voter_name

LEGS = ("charlie->voter", "charlie->bob", "voter->bob")
CONTROLLER_OUTCOME_BITS = 1
RULE_BITS = 1
INITIAL_STATE_BITS = 1

_OPS = tuple(PauliOp)


def random_rule(rng: np.random.Generator) -> VotingRule:
    yes, no = rng.choice(len(_OPS), size=2, replace=False)
    return VotingRule(_OPS[int(yes)], _OPS[int(no)])


@dataclass(frozen=True)
class Protocol1Config:
    n_voters: int
    channel_spec: GhzLikeSpec = GhzLikeSpec()
    rules: tuple[VotingRule, ...] | None = None
    decoys_per_leg: int = 1
    shared_rule: VotingRule | None = None
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.n_voters < 1:
            raise ValidationError("n_voters must be >= 1")
        if self.rules is not None and len(self.rules) != self.n_voters:
            raise ValidationError("one rule per voter is required")
        if self.rules is not None and self.shared_rule is not None:
            raise ValidationError("give either per-voter rules or a shared rule")
        if self.decoys_per_leg < 0:
            raise ValidationError("decoys_per_leg must be >= 0")


@dataclass(frozen=True)
class Protocol2Config:
    n_voters: int
    initial_bell: BellLabel = BellLabel.PSI_PLUS
    public_rule: VotingRule = VotingRule(PauliOp.I, PauliOp.Z)
    decoys_per_leg: int = 1
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.n_voters < 1:
            raise ValidationError("n_voters must be >= 1")
        if self.decoys_per_leg < 0:
            raise ValidationError("decoys_per_leg must be >= 0")


@dataclass(frozen=True)
class PermutationSecret:
    """Charlie's permutation; ``pi[j]`` is the pair whose second qubit lands at position j."""

    pi: tuple[int, ...]
    held_by: str = "Charlie"

    def __post_init__(self):
        _check_permutation(self.pi)

    @classmethod
    def sample(cls, n: int, rng: np.random.Generator) -> "PermutationSecret":
        return cls(tuple(int(x) for x in rng.permutation(n)))


def _check_permutation(pi: Sequence[int]) -> None:
    if sorted(pi) != list(range(len(pi))):
        raise ValidationError(f"{list(pi)} is not a permutation of 0..{len(pi) - 1}")


def apply_permutation(seq: Sequence, pi: Sequence[int]) -> list:
    """Position j of the result holds ``seq[pi[j]]`` (0-based)."""
    if len(seq) != len(pi):
        raise ValidationError(f"sequence length {len(seq)} != permutation length {len(pi)}")
    _check_permutation(pi)
    return [seq[p] for p in pi]


def invert_permutation(pi: Sequence[int]) -> tuple[int, ...]:
    _check_permutation(pi)
    inv = [0] * len(pi)
    for j, p in enumerate(pi):
        inv[p] = j
    return tuple(inv)


def protocol1_decode(bell_outcome: BellLabel, charlie_outcome: int, channel_spec: GhzLikeSpec, rule: VotingRule) -> int:
    """Recover the vote; raises :class:`TamperSignal` for operators outside the rule."""
    initial = channel_spec.branch_label(charlie_outcome)
    return rule.vote_for(bell_transition_inverse(initial, bell_outcome))


def protocol1_marginal(channel_spec: GhzLikeSpec, op: PauliOp) -> dict[BellLabel, float]:
    """Bob's Bell-outcome distribution when he ignores Charlie's announcement."""
    state = apply_unitary(ghz_like(channel_spec), op.matrix, [0])
    return {BellLabel(lbl): p for lbl, p in outcome_distribution(state, bell_basis(), [0, 1])}


def controller_necessity_tvd(channel_spec: GhzLikeSpec, rule: VotingRule) -> float:
    """Total variation distance between Bob's yes and no marginals without Charlie.

    Zero means Bob learns nothing about the vote before Charlie announces.
    """
    yes = protocol1_marginal(channel_spec, rule.yes_op)
    no = protocol1_marginal(channel_spec, rule.no_op)
    return 0.5 * sum(abs(yes[b] - no[b]) for b in BellLabel)


def random_pairing_expectation(n: int) -> float:
    """Expected fraction of votes decoded correctly when Bob guesses the pairing.

    A guessed partner is right with probability 1/n; a wrong partner gives a
    uniformly random Bell outcome, right by chance with probability 1/4.
    """
    return (n + 3) / (4 * n)


@dataclass
class VoteRound:
    voter: str
    cast_vote: int
    rule: VotingRule
    controller_outcome: int | None = None
    bell_outcome: BellLabel | None = None
    decoded: int | None = None
    tampered: bool = False
    aborted: bool = False
    qubits: dict = field(default_factory=dict)


class _Election:
    protocol = ""

    def __init__(self, votes, rng, adversary, authority, decoys, threshold):
        self.votes = [int(v) for v in votes]
        if any(v not in (0, 1) for v in self.votes):
            raise ValidationError("votes must be bits")
        self.rng = rng
        self.adversary = adversary
        self.authority = authority or CertificateAuthority()
        self.decoys = decoys
        self.threshold = threshold
        self.system = QubitSystem()
        self.transcript = ProtocolTranscript()
        self.board = BulletinBoard(self.transcript)
        self.rounds: list[VoteRound] = []

    def _setup(self, **extra):
        self.transcript.log(
            "initial",
            "Charlie",
            "setup",
            {"protocol": self.protocol, "n_voters": len(self.votes), "decoys_per_leg": self.decoys, **extra},
        )
        self.board.post("voting", "Charlie", {"bulletin_board": "open"}, 0)

    def _authenticate(self, name: str, checkers=("Bob", "Charlie")) -> None:
        for checker in checkers:
            ok = self.authority.authenticate(name)
            self.transcript.log("voting", checker, "authenticate", {"party": name, "accepted": ok})
            if not ok:
                raise AuthenticationError(f"CA rejected {name}")

    def _send(self, leg, sender, receiver, qubits):
        received, _ = protected_transfer(
            self.system,
            self.transcript,
            self.rng,
            leg=leg,
            sender=sender,
            receiver=receiver,
            qubits=qubits,
            decoys_per_qubit=self.decoys,
            adversary=self.adversary,
            threshold=self.threshold,
        )
        return received

    def _decode_round(self, rnd: VoteRound, initial: BellLabel) -> None:
        try:
            rnd.decoded = rnd.rule.vote_for(bell_transition_inverse(initial, rnd.bell_outcome))
        except TamperSignal:
            rnd.tampered = True
        self.transcript.log(
            "counting",
            "Bob",
            "decode",
            {"voter": rnd.voter, "vote": rnd.decoded, "invalid": rnd.tampered},
            dc=int(rnd.decoded is not None),
        )

    def _finish(self) -> int:
        tally = sum(r.decoded for r in self.rounds if r.decoded is not None)
        recount = sum(r.payload["vote"] or 0 for r in self.transcript.select(action="decode"))
        if recount != tally:
            raise ConsistencyError(f"tally {tally} disagrees with decoded records ({recount})")
        if self.adversary is None:
            for r in self.rounds:
                if not r.aborted and r.decoded != r.cast_vote:
                    raise ConsistencyError(f"{r.voter}: decoded {r.decoded} but cast {r.cast_vote}")
        self.board.post("counting", "Bob", {"tally": tally}, 0)
        return tally


class Protocol1Election(_Election):
    protocol = "cdsqc1"

    def __init__(self, config: Protocol1Config, votes, rng, adversary=None, authority=None):
        if len(votes) != config.n_voters:
            raise ValidationError(f"expected {config.n_voters} votes, got {len(votes)}")
        super().__init__(votes, rng, adversary, authority, config.decoys_per_leg, config.threshold)
        self.config = config

    def run(self) -> tuple[ProtocolTranscript, int]:
        spec = self.config.channel_spec
        self._setup(
            channel={"psi1": spec.psi1.value, "psi2": spec.psi2.value, "controller_basis": spec.controller_basis.value},
            shared_rule=self.config.shared_rule.to_payload() if self.config.shared_rule else None,
        )
        for i, vote in enumerate(self.votes):
            self.rounds.append(self._round(i, vote))
        return self.transcript, self._count()

    def _rule(self, i: int) -> VotingRule:
        if self.config.shared_rule is not None:
            return self.config.shared_rule
        if self.config.rules is not None:
            return self.config.rules[i]
        return random_rule(self.rng)

    def _round(self, i: int, vote: int) -> VoteRound:
        name = voter_name(i)
        log = self.transcript.log
        self._authenticate(name)
        rnd = VoteRound(name, vote, self._rule(i))
        if self.config.shared_rule is None:
            log("voting", "Charlie", "disclose", {"to": name, "channel": "bb84-encrypted"}, db=RULE_BITS)

        spec = self.config.channel_spec
        q1, q2, q3 = self.system.prepare(ghz_like(spec))
        log("voting", "Charlie", "prepare", {"what": "ghz-like", "for": name, "qubits": 3}, dq=3)
        rnd.qubits = {"voter": q1, "bob": q2, "charlie": q3}
        got = self._send("charlie->voter", "Charlie", name, [q1])
        if got is None:
            rnd.aborted = True
            return rnd
        q1 = got[0]
        got = self._send("charlie->bob", "Charlie", "Bob", [q2])
        if got is None:
            rnd.aborted = True
            return rnd
        q2 = got[0]

        self.system.apply(rnd.rule.op_for(vote).matrix, [q1])
        log("voting", name, "apply", {"qubit": "encoded"})
        got = self._send("voter->bob", name, "Bob", [q1])
        if got is None:
            rnd.aborted = True
            return rnd
        q1 = got[0]

        label = self.system.measure(spec.controller_basis.basis, [q3], self.rng)
        rnd.controller_outcome = 0 if label in ("0", "+") else 1
        self.board.post(
            "voting", "Charlie", {"voter": name, "outcome": label, "bit": rnd.controller_outcome}, CONTROLLER_OUTCOME_BITS
        )
        rnd.bell_outcome = BellLabel(self.system.measure(bell_basis(), [q1, q2], self.rng))
        self.board.post("voting", "Bob", {"voter": name, "outcome": rnd.bell_outcome.value}, 0)
        return rnd

    def _count(self) -> int:
        self.transcript.log("counting", "Charlie", "marker", {"phase": "counting"})
        spec = self.config.channel_spec
        for rnd in self.rounds:
            if rnd.aborted:
                continue
            if self.config.shared_rule is None:
                self.transcript.log(
                    "counting", "Charlie", "disclose", {"voter": rnd.voter, "rule": rnd.rule.to_payload()}, db=RULE_BITS
                )
            self._decode_round(rnd, spec.branch_label(rnd.controller_outcome))
        return self._finish()


def protocol1_run(
    config: Protocol1Config,
    votes: Sequence[int],
    rng: np.random.Generator,
    adversary: EavesdropperModel | None = None,
    authority: CertificateAuthority | None = None,
) -> tuple[ProtocolTranscript, int]:
    return Protocol1Election(config, votes, rng, adversary, authority).run()


class Protocol2Election(_Election):
    protocol = "cdsqc2"

    def __init__(self, config: Protocol2Config, votes, rng, adversary=None, authority=None, permutation=None):
        if len(votes) != config.n_voters:
            raise ValidationError(f"expected {config.n_voters} votes, got {len(votes)}")
        super().__init__(votes, rng, adversary, authority, config.decoys_per_leg, config.threshold)
        self.config = config
        self.secret = PermutationSecret(tuple(permutation)) if permutation is not None else None
        self.bob_string: list[int] | None = None
        self.voter_qubits: dict[int, int] = {}

    def run(self) -> tuple[ProtocolTranscript, int]:
        self.run_voting()
        return self.transcript, self.count()

    def run_voting(self) -> None:
        cfg = self.config
        log = self.transcript.log
        n = cfg.n_voters
        self._setup(public_rule=cfg.public_rule.to_payload())
        self.rounds = [VoteRound(voter_name(i), v, cfg.public_rule) for i, v in enumerate(self.votes)]
        for rnd in self.rounds:
            self._authenticate(rnd.voter, checkers=("Bob",))

        pairs = []
        for rnd in self.rounds:
            a, b = self.system.prepare(bell(cfg.initial_bell))
            log("voting", "Charlie", "prepare", {"what": "bell", "for": rnd.voter, "qubits": 2}, dq=2)
            rnd.qubits = {"voter": a, "bob": b}
            pairs.append((a, b))

        for i, rnd in enumerate(self.rounds):
            got = self._send("charlie->voter", "Charlie", rnd.voter, [pairs[i][0]])
            if got is None:
                rnd.aborted = True
            else:
                self.voter_qubits[i] = got[0]

        if self.secret is None:
            self.secret = PermutationSecret.sample(n, self.rng)
        string = apply_permutation([b for _, b in pairs], self.secret.pi)
        got = self._send("charlie->bob", "Charlie", "Bob", string)
        if got is None:
            for rnd in self.rounds:
                rnd.aborted = True
            self.bob_string = None
        else:
            self.bob_string = got

        for i, rnd in enumerate(self.rounds):
            if rnd.aborted:
                continue
            q = self.voter_qubits[i]
            self.system.apply(rnd.rule.op_for(rnd.cast_vote).matrix, [q])
            log("voting", rnd.voter, "apply", {"qubit": "encoded"})
            got = self._send("voter->bob", rnd.voter, "Bob", [q])
            if got is None:
                rnd.aborted = True
            else:
                self.voter_qubits[i] = got[0]
        self.board.post("voting", "Bob", {"notice": "all encoded qubits received"}, 0)

    def count(self) -> int:
        log = self.transcript.log
        log("counting", "Charlie", "marker", {"phase": "counting"})
        live = [i for i, r in enumerate(self.rounds) if not r.aborted]
        if live:
            log("counting", "Charlie", "disclose", {"permutation": list(self.secret.pi)})
        for i in live:
            self.board.post(
                "counting", "Charlie", {"voter": self.rounds[i].voter, "initial": self.config.initial_bell.value}, INITIAL_STATE_BITS
            )
        inv = invert_permutation(self.secret.pi)
        for i in live:
            self._bell_measure(i, inv[i])
            self._decode_round(self.rounds[i], self.config.initial_bell)
        return self._finish()

    def _bell_measure(self, voter_index: int, string_position: int) -> None:
        rnd = self.rounds[voter_index]
        q = self.voter_qubits[voter_index]
        partner = self.bob_string[string_position]
        rnd.bell_outcome = BellLabel(self.system.measure(bell_basis(), [q, partner], self.rng))
        self.transcript.log("counting", "Bob", "measure", {"voter": rnd.voter, "outcome": rnd.bell_outcome.value})

    def decode_with_guessed_pairing(self) -> list[int | None]:
        """Counting phase without the permutation: Bob pairs at random.

        Returns the decoded vote per voter (``None`` when aborted or tampered).
        """
        self.transcript.log("counting", "Charlie", "marker", {"phase": "counting", "permutation_withheld": True})
        live = [i for i, r in enumerate(self.rounds) if not r.aborted]
        guess = [int(x) for x in self.rng.permutation(len(self.rounds))]
        for i in live:
            self._bell_measure(i, guess[i])
            self._decode_round(self.rounds[i], self.config.initial_bell)
        return [r.decoded for r in self.rounds]


def protocol2_run(
    config: Protocol2Config,
    votes: Sequence[int],
    rng: np.random.Generator,
    adversary: EavesdropperModel | None = None,
    authority: CertificateAuthority | None = None,
    permutation: Sequence[int] | None = None,
) -> tuple[ProtocolTranscript, int]:
    return Protocol2Election(config, votes, rng, adversary, authority, permutation).run()
