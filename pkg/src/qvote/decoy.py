"""Decoy-qubit eavesdropping checks (BB84 subroutine) and channel adversaries."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qvote.errors import ProtocolViolationError, ValidationError
from qvote.qstate import MINUS, ONE, PLUS, ZERO, MeasurementBasis, StateVector
from qvote.system import QubitSystem
from qvote.transcript import ProtocolTranscript

DEFAULT_THRESHOLD = 0.11


class DecoyBasis(enum.Enum):
    COMPUTATIONAL = "Z"
    DIAGONAL = "X"

    @property
    def measurement(self) -> MeasurementBasis:
        return _BASES[self]


_BASES = {
    DecoyBasis.COMPUTATIONAL: MeasurementBasis.computational(1),
    DecoyBasis.DIAGONAL: MeasurementBasis.diagonal(),
}


class DecoyState(enum.Enum):
    ZERO = "0"
    ONE = "1"
    PLUS = "+"
    MINUS = "-"

    @property
    def basis(self) -> DecoyBasis:
        return DecoyBasis.COMPUTATIONAL if self in (DecoyState.ZERO, DecoyState.ONE) else DecoyBasis.DIAGONAL

    @property
    def ket(self) -> StateVector:
        return {DecoyState.ZERO: ZERO, DecoyState.ONE: ONE, DecoyState.PLUS: PLUS, DecoyState.MINUS: MINUS}[self]


_DECOY_STATES = tuple(DecoyState)


@dataclass(frozen=True)
class DecoyRecord:
    position: int
    prepared_state: DecoyState
    basis: DecoyBasis

    def __post_init__(self):
        if self.prepared_state.basis is not self.basis:
            raise ValidationError(f"decoy {self.prepared_state.value} is not a {self.basis.name} state")


class Subroutine(enum.Enum):
    BB84 = "bb84"
    GV = "gv"


class Verdict(enum.Enum):
    PASS = "pass"
    ABORT = "abort"


@dataclass(frozen=True)
class CheckResult:
    tested: int
    errors: int
    error_rate: float
    verdict: Verdict


class AdversaryKind(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"
    REPLACE_FIXED = "replace-fixed"


@dataclass(frozen=True)
class EavesdropperModel:
    """Channel adversary acting on every qubit of one leg, decoys included.

    ``acts_on`` names a leg (see each protocol's ``LEGS``); ``None`` means
    every leg.
    """

    kind: AdversaryKind = AdversaryKind.NONE
    acts_on: str | None = None
    fixed_state: DecoyState = DecoyState.ZERO

    @classmethod
    def none(cls) -> "EavesdropperModel":
        return cls()

    @classmethod
    def intercept_resend(cls, leg: str | None = None) -> "EavesdropperModel":
        return cls(AdversaryKind.INTERCEPT_RESEND, leg)

    @classmethod
    def replace_fixed(cls, state: DecoyState = DecoyState.ZERO, leg: str | None = None) -> "EavesdropperModel":
        return cls(AdversaryKind.REPLACE_FIXED, leg, state)

    def targets(self, leg: str) -> bool:
        return self.kind is not AdversaryKind.NONE and self.acts_on in (None, leg)

    def describe(self) -> dict:
        d = {"kind": self.kind.value, "leg": self.acts_on}
        if self.kind is AdversaryKind.REPLACE_FIXED:
            d["state"] = self.fixed_state.value
        return d


def insert_decoys(system: QubitSystem, message: Sequence[int], count: int, rng: np.random.Generator):
    """Mix ``count`` random BB84 decoys into ``message`` at random positions.

    Returns the protected sequence and the sender's private decoy records.
    Message qubits keep their relative order.
    """
    if count < 0:
        raise ValidationError("decoy count must be >= 0")
    message = list(message)
    total = len(message) + count
    positions = sorted(int(p) for p in rng.choice(total, size=count, replace=False)) if count else []
    states = [_DECOY_STATES[int(i)] for i in rng.integers(0, 4, size=count)]
    decoy_at = dict(zip(positions, states))
    out, records, it = [], [], iter(message)
    for pos in range(total):
        if pos in decoy_at:
            st = decoy_at[pos]
            out.append(system.prepare_one(st.ket))
            records.append(DecoyRecord(pos, st, st.basis))
        else:
            out.append(next(it))
    return out, records


def strip_decoys(received: Sequence[int], records: Sequence[DecoyRecord]) -> list[int]:
    taken = {r.position for r in records}
    return [q for i, q in enumerate(received) if i not in taken]


def bb84_check(
    system: QubitSystem,
    records: Sequence[DecoyRecord],
    received: Sequence[int],
    rng: np.random.Generator,
    threshold: float = DEFAULT_THRESHOLD,
    subroutine: Subroutine = Subroutine.BB84,
) -> CheckResult:
    """Measure each decoy in its preparation basis and count mismatches."""
    if subroutine is Subroutine.GV:
        raise NotImplementedError("GV subroutine is not implemented")
    errors = 0
    for rec in records:
        if not 0 <= rec.position < len(received):
            raise ProtocolViolationError(f"decoy position {rec.position} outside sequence of {len(received)}")
        outcome = system.measure(rec.basis.measurement, [received[rec.position]], rng)
        errors += outcome != rec.prepared_state.value
    tested = len(records)
    rate = errors / tested if tested else 0.0
    return CheckResult(tested, errors, rate, Verdict.ABORT if rate > threshold else Verdict.PASS)


def apply_adversary(model: EavesdropperModel, system: QubitSystem, sequence: Sequence[int], rng: np.random.Generator) -> list[int]:
    """Return the sequence as it leaves the adversary.

    The adversary only sees qubit handles; decoys and message qubits are
    treated identically. Intercepted originals stay with the adversary.
    """
    if model.kind is AdversaryKind.NONE:
        raise ValidationError("apply_adversary needs an active adversary model")
    out = []
    for q in sequence:
        if model.kind is AdversaryKind.INTERCEPT_RESEND:
            basis = DecoyBasis.COMPUTATIONAL if rng.random() < 0.5 else DecoyBasis.DIAGONAL
            label = system.measure(basis.measurement, [q], rng)
            out.append(system.prepare_one(DecoyState(label).ket))
        else:
            out.append(system.prepare_one(model.fixed_state.ket))
    return out


def protected_transfer(
    system: QubitSystem,
    transcript: ProtocolTranscript,
    rng: np.random.Generator,
    *,
    leg: str,
    sender: str,
    receiver: str,
    qubits: Sequence[int],
    decoys_per_qubit: int,
    adversary: EavesdropperModel | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    subroutine: Subroutine = Subroutine.BB84,
    phase: str = "voting",
) -> tuple[list[int] | None, CheckResult | None]:
    """Send ``qubits`` over one leg with decoy protection and log every step.

    Returns the message qubits as received (``None`` if the leg aborted) and
    the check result (``None`` when no decoys were used).
    """
    count = decoys_per_qubit * len(qubits)
    seq, records = insert_decoys(system, qubits, count, rng)
    if count:
        transcript.log(phase, sender, "prepare", {"what": "decoys", "leg": leg, "qubits": count}, dq=count)
    for slot in range(len(seq)):
        transcript.log(phase, sender, "transmit-qubit", {"leg": leg, "to": receiver, "slot": slot})
    if adversary is not None and adversary.targets(leg):
        seq = apply_adversary(adversary, system, seq, rng)
        transcript.log(phase, "Eve", "attack", {"leg": leg, "model": adversary.describe()})
    if not count:
        return seq, None
    # eavesdropping-check traffic is excluded from the decoding bit count
    transcript.log(
        phase,
        sender,
        "announce",
        {"leg": leg, "decoy_positions": [r.position for r in records], "decoy_states": [r.prepared_state.value for r in records]},
    )
    result = bb84_check(system, records, seq, rng, threshold, subroutine)
    transcript.log(
        phase,
        receiver,
        "check",
        {"leg": leg, "tested": result.tested, "errors": result.errors, "verdict": result.verdict.value},
    )
    if result.verdict is Verdict.ABORT:
        transcript.log(phase, receiver, "abort", {"leg": leg, "reason": "eavesdropping detected"})
        return None, result
    return strip_decoys(seq, records), result
