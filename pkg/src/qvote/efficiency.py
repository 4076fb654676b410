"""Resource accounting and qubit efficiency, eta = c / (q + b)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from qvote.errors import AccountingError, UndefinedEfficiencyError, ValidationError
from qvote.transcript import ProtocolTranscript


@dataclass(frozen=True)
class ResourceLedger:
    """c conveyed vote bits, q qubits (decoys included), b decoding bits.

    Counts are exact rationals so per-vote ledgers of partly aborted runs
    stay exact; they compare equal to plain ints when integral.
    """

    c: Fraction
    q: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("c", "q", "b"):
            value = Fraction(getattr(self, name))
            if value < 0:
                raise ValidationError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)

    def eta(self) -> Fraction:
        return eta(self)

    def scaled(self, factor) -> "ResourceLedger":
        f = Fraction(factor)
        return ResourceLedger(self.c * f, self.q * f, self.b * f)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.c, self.q, self.b

    def to_dict(self) -> dict:
        return {k: _plain(v) for k, v in zip("cqb", self.as_tuple())}


def _plain(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


def eta(ledger: ResourceLedger) -> Fraction:
    denom = ledger.q + ledger.b
    if denom == 0:
        raise UndefinedEfficiencyError("efficiency is undefined when q + b = 0")
    return ledger.c / denom


def ledger_from_transcript(transcript: ProtocolTranscript, per_vote: bool = True) -> ResourceLedger:
    """Sum the resource deltas of a completed transcript.

    ``per_vote`` divides by the number of voters declared in the setup record.
    """
    if transcript.marker_index is None:
        raise AccountingError("transcript has no counting-phase marker")
    totals = ResourceLedger(
        sum(r.dc for r in transcript),
        sum(r.dq for r in transcript),
        sum(r.db for r in transcript),
    )
    if not per_vote:
        return totals
    n = transcript.setup.get("n_voters")
    if not n:
        raise AccountingError("setup record does not declare n_voters")
    return totals.scaled(Fraction(1, n))
