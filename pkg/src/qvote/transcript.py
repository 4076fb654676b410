"""Protocol transcripts and their line-delimited JSON wire format.

One record per line, UTF-8, keys sorted, no insignificant whitespace::

    {"action":"announce","actor":"Voter1","index":7,"payload":{...},
     "phase":"voting","resources":{"db":3,"dc":0,"dq":0}}

Qubits are charged (``dq``) on the ``prepare`` record that creates them, so a
qubit that is sent twice, or kept by its preparer, is still counted once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from qvote.errors import ValidationError

PHASES = ("initial", "voting", "counting")
ACTIONS = (
    "setup",
    "authenticate",
    "prepare",
    "transmit-qubit",
    "apply",
    "measure",
    "announce",
    "disclose",
    "check",
    "abort",
    "marker",
    "decode",
    "attack",
)
# payload keys that carry a voting secret and must stay out of pre-counting records
SECRET_KEYS = frozenset({"permutation", "rule", "yes_op", "no_op"})


@dataclass(frozen=True)
class Record:
    index: int
    phase: str
    actor: str
    action: str
    payload: dict = field(default_factory=dict)
    dq: int = 0
    db: int = 0
    dc: int = 0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "phase": self.phase,
            "actor": self.actor,
            "action": self.action,
            "payload": self.payload,
            "resources": {"dq": self.dq, "db": self.db, "dc": self.dc},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Record":
        res = d.get("resources", {})
        return cls(
            index=d["index"],
            phase=d["phase"],
            actor=d["actor"],
            action=d["action"],
            payload=d.get("payload", {}),
            dq=res.get("dq", 0),
            db=res.get("db", 0),
            dc=res.get("dc", 0),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class ProtocolTranscript:
    """Append-only ordered log of everything that happens in a run."""

    def __init__(self, records: Iterable[Record] = ()):
        self.records: list[Record] = list(records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProtocolTranscript) and self.records == other.records

    def log(self, phase: str, actor: str, action: str, payload: dict | None = None, *, dq=0, db=0, dc=0) -> Record:
        if phase not in PHASES:
            raise ValidationError(f"unknown phase {phase!r}")
        if action not in ACTIONS:
            raise ValidationError(f"unknown action {action!r}")
        if action == "marker" and self.marker_index is not None:
            raise ValidationError("transcript already has a counting-phase marker")
        rec = Record(len(self.records), phase, actor, action, dict(payload or {}), dq, db, dc)
        self.records.append(rec)
        return rec

    @property
    def marker_index(self) -> int | None:
        for rec in self.records:
            if rec.action == "marker":
                return rec.index
        return None

    @property
    def setup(self) -> dict:
        for rec in self.records:
            if rec.action == "setup":
                return rec.payload
        return {}

    def select(self, action: str | None = None, actor: str | None = None, phase: str | None = None) -> list[Record]:
        return [
            r
            for r in self.records
            if (action is None or r.action == action)
            and (actor is None or r.actor == actor)
            and (phase is None or r.phase == phase)
        ]

    def bulletin_board(self) -> list[Record]:
        """Public announcements, in order."""
        return self.select(action="announce")

    def validate(self) -> None:
        for i, rec in enumerate(self.records):
            if rec.index != i:
                raise ValidationError(f"record {i} has index {rec.index}")
            if min(rec.dq, rec.db, rec.dc) < 0:
                raise ValidationError(f"record {i} has a negative resource delta")
            if rec.action == "transmit-qubit" and rec.dq != 0:
                raise ValidationError(f"record {i}: qubits are charged at preparation, not transmission")
            if rec.action == "prepare" and rec.dq != rec.payload.get("qubits", rec.dq):
                raise ValidationError(f"record {i}: dq does not match prepared qubit count")
        if sum(r.action == "marker" for r in self.records) != 1:
            raise ValidationError("transcript needs exactly one counting-phase marker")

    def to_jsonl(self) -> str:
        return "".join(rec.to_json() + "\n" for rec in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "ProtocolTranscript":
        # split on "\n" only; str.splitlines would also break at U+0085 and U+2028 inside payload strings
        return cls(Record.from_dict(json.loads(line)) for line in text.split("\n") if line.strip())

    def write(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def read(cls, path) -> "ProtocolTranscript":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))


class BulletinBoard:
    """Append-only public channel; every post carries its classical bit cost."""

    def __init__(self, transcript: ProtocolTranscript):
        self._transcript = transcript

    def post(self, phase: str, actor: str, payload: dict, bits: int) -> Record:
        return self._transcript.log(phase, actor, "announce", payload, db=bits)

    @property
    def entries(self) -> list[tuple[str, dict, int]]:
        return [(r.actor, r.payload, r.db) for r in self._transcript.bulletin_board()]


def _walk_keys(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield k
            yield from _walk_keys(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _walk_keys(v)


def secret_leaks(transcript: ProtocolTranscript, keys=SECRET_KEYS) -> list[Record]:
    """Records before the counting marker whose payload contains a secret key."""
    marker = transcript.marker_index
    end = len(transcript) if marker is None else marker
    return [r for r in transcript.records[:end] if any(k in keys for k in _walk_keys(r.payload))]
