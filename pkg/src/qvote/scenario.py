"""Scenario configuration, seeded execution and the efficiency report."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from qvote import attacks, cdsqc, tzl
from qvote.decoy import DEFAULT_THRESHOLD, DecoyState, EavesdropperModel
from qvote.efficiency import ResourceLedger, ledger_from_transcript
from qvote.errors import ConfigurationError
from qvote.states import PauliOp
from qvote.transcript import ProtocolTranscript

PROTOCOLS = ("tzl", "tzl-charlie-prep", "cdsqc1", "cdsqc2")
CHANNEL_ADVERSARIES = ("none", "intercept-resend", "replace-fixed")
ATTACKS = ("separable", "no-controller", "replace")
ADVERSARIES = CHANNEL_ADVERSARIES + ATTACKS
SHARED_RULE = tzl.VotingRule(PauliOp.I, PauliOp.X)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines a run. ``decoys_per_leg=None`` picks the protocol default."""

    protocol: str = "tzl"
    n_voters: int = 3
    votes: str = "random"
    seed: int = 0
    adversary: str = "none"
    adversary_leg: str | None = None
    decoys_per_leg: int | None = None
    abort_threshold: float = DEFAULT_THRESHOLD
    trials: int = 1
    shared_rule: bool = False
    eve_vote: int = 1

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ConfigurationError("protocol", f"expected one of {', '.join(PROTOCOLS)}, got {self.protocol!r}")
        if self.n_voters < 1:
            raise ConfigurationError("n_voters", "must be at least 1")
        if self.votes != "random":
            if any(ch not in "01" for ch in self.votes):
                raise ConfigurationError("votes", "must be a bit string or 'random'")
            if len(self.votes) != self.n_voters:
                raise ConfigurationError("votes", f"has {len(self.votes)} bits but n_voters is {self.n_voters}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed", "must be a 64-bit unsigned integer")
        if self.adversary not in ADVERSARIES:
            raise ConfigurationError("adversary", f"expected one of {', '.join(ADVERSARIES)}, got {self.adversary!r}")
        if self.decoys_per_leg is not None and self.decoys_per_leg < 0:
            raise ConfigurationError("decoys_per_leg", "must be non-negative")
        if not 0.0 <= self.abort_threshold <= 1.0:
            raise ConfigurationError("abort_threshold", "must lie in [0, 1]")
        if self.trials < 1:
            raise ConfigurationError("trials", "must be at least 1")
        if self.shared_rule and self.protocol != "cdsqc1":
            raise ConfigurationError("shared_rule", "only applies to cdsqc1")
        if self.eve_vote not in (0, 1):
            raise ConfigurationError("eve_vote", "must be 0 or 1")
        is_tzl = self.protocol.startswith("tzl")
        legs = tzl.LEGS if is_tzl else cdsqc.LEGS
        if self.adversary == "separable" and self.protocol != "tzl":
            raise ConfigurationError("adversary", "the separable attack needs Bob to prepare the TZL channel")
        if self.adversary == "no-controller" and not is_tzl:
            raise ConfigurationError("adversary", "the no-controller attack targets TZL")
        if self.adversary == "replace":
            if is_tzl:
                legs = tuple(t.value for t in attacks.TargetLeg)
                if self.decoys > 0:
                    raise ConfigurationError("decoys_per_leg", "the TZL replacement attack targets unprotected legs")
        if self.adversary_leg is not None and self.adversary_leg not in legs:
            raise ConfigurationError("adversary_leg", f"expected one of {', '.join(legs)}, got {self.adversary_leg!r}")

    @property
    def decoys(self) -> int:
        if self.decoys_per_leg is not None:
            return self.decoys_per_leg
        return 0 if self.protocol.startswith("tzl") else 1

    @property
    def label(self) -> str:
        if self.protocol.startswith("tzl") and self.decoys:
            return self.protocol + "+decoys"
        if self.shared_rule:
            return "cdsqc1 shared-rule"
        return self.protocol

    @property
    def derived(self) -> bool:
        return self.shared_rule

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrialResult:
    transcript: ProtocolTranscript
    tally: int | None
    aborts: int
    attack: dict | None = None


@dataclass
class ScenarioSummary:
    label: str
    protocol: str
    derived: bool
    trials: int
    tallies: list
    aborts: int
    ledger: ResourceLedger
    eta: Fraction
    attack: dict | None = None
    config: dict = field(default_factory=dict)

    @property
    def tally(self):
        return self.tallies[0] if self.tallies else None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "protocol": self.protocol,
            "derived": self.derived,
            "trials": self.trials,
            "tally": self.tally,
            "tallies": self.tallies,
            "aborts": self.aborts,
            "ledger": self.ledger.to_dict(),
            "eta": float(self.eta),
            "attack": self.attack,
            "config": self.config,
        }


def _votes(config: ScenarioConfig, rng: np.random.Generator) -> list[int]:
    if config.votes == "random":
        return [int(v) for v in rng.integers(0, 2, size=config.n_voters)]
    return [int(ch) for ch in config.votes]


def _channel_adversary(config: ScenarioConfig) -> EavesdropperModel | None:
    if config.adversary == "intercept-resend":
        return EavesdropperModel.intercept_resend(config.adversary_leg)
    if config.adversary == "replace-fixed":
        return EavesdropperModel.replace_fixed(DecoyState.ZERO, config.adversary_leg)
    return None


def _count_aborts(transcript: ProtocolTranscript) -> int:
    return len(transcript.select(action="abort"))


def _attack_trial(config: ScenarioConfig, rng: np.random.Generator) -> TrialResult:
    if config.adversary == "separable":
        outcome = attacks.separable_attack(_votes(config, rng), rng)
    elif config.adversary == "no-controller":
        outcome = attacks.no_controller_attack(
            _votes(config, rng), rng, charlie_prepares=config.protocol == "tzl-charlie-prep"
        )
    elif config.protocol.startswith("tzl"):
        leg = attacks.TargetLeg(config.adversary_leg or attacks.TargetLeg.CHANNEL_QUBITS.value)
        outcome = attacks.eve_replace_attack(leg, config.eve_vote, rng, trials=config.n_voters)
    else:
        outcome = attacks.replace_attack_on_decoys(config.protocol, rng, config.n_voters, config.adversary_leg or "voter->bob")
    transcript = outcome.details["transcript"]
    tallies = [r.payload["tally"] for r in transcript.bulletin_board() if "tally" in r.payload]
    summary = {
        "attacker": outcome.attacker.value,
        "success_rate": outcome.success_rate,
        "detection_rate": outcome.detection_rate,
        "samples": outcome.trials,
    }
    return TrialResult(transcript, tallies[-1] if tallies else None, _count_aborts(transcript), summary)


def _protocol_trial(config: ScenarioConfig, rng: np.random.Generator) -> TrialResult:
    votes = _votes(config, rng)
    adversary = _channel_adversary(config)
    common = {"adversary": adversary}
    if config.protocol.startswith("tzl"):
        transcript, tally = tzl.run_tzl_voting(
            votes,
            rng,
            charlie_prepares=config.protocol == "tzl-charlie-prep",
            decoys_per_qubit=config.decoys,
            threshold=config.abort_threshold,
            **common,
        )
    elif config.protocol == "cdsqc1":
        cfg = cdsqc.Protocol1Config(
            config.n_voters,
            decoys_per_leg=config.decoys,
            shared_rule=SHARED_RULE if config.shared_rule else None,
            threshold=config.abort_threshold,
        )
        transcript, tally = cdsqc.protocol1_run(cfg, votes, rng, **common)
    else:
        cfg = cdsqc.Protocol2Config(config.n_voters, decoys_per_leg=config.decoys, threshold=config.abort_threshold)
        transcript, tally = cdsqc.protocol2_run(cfg, votes, rng, **common)
    return TrialResult(transcript, tally, _count_aborts(transcript))


def run_trial(config: ScenarioConfig, seed_seq: np.random.SeedSequence) -> TrialResult:
    rng = np.random.default_rng(seed_seq)
    if config.adversary in ATTACKS:
        return _attack_trial(config, rng)
    return _protocol_trial(config, rng)


def _reduce_attacks(results: list[TrialResult]) -> dict:
    total = sum(r.attack["samples"] for r in results)
    first = results[0].attack

    def weighted(key):
        return sum(r.attack[key] * r.attack["samples"] for r in results) / total if total else 0.0

    return {
        "attacker": first["attacker"],
        "success_rate": weighted("success_rate"),
        "detection_rate": weighted("detection_rate"),
        "samples": total,
    }


def run_scenario(config: ScenarioConfig, workers: int = 1) -> tuple[ProtocolTranscript, ScenarioSummary]:
    """Run ``config.trials`` independent seeded trials.

    Child seeds are spawned from ``config.seed`` and results are reduced in
    seed order, so the output does not depend on ``workers``. The returned
    transcript and ledger belong to the first trial.
    """
    config.validate()
    children = np.random.SeedSequence(config.seed).spawn(config.trials)
    if workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, [config] * config.trials, children))
    else:
        results = [run_trial(config, child) for child in children]
    transcript = results[0].transcript
    transcript.validate()
    ledger = ledger_from_transcript(transcript, per_vote=True)
    summary = ScenarioSummary(
        label=config.label,
        protocol=config.protocol,
        derived=config.derived,
        trials=config.trials,
        tallies=[r.tally for r in results],
        aborts=sum(r.aborts for r in results),
        ledger=ledger,
        eta=ledger.eta(),
        attack=_reduce_attacks(results) if config.adversary in ATTACKS else None,
        config=config.to_dict(),
    )
    return transcript, summary


CANONICAL_SCENARIOS = (
    ScenarioConfig(protocol="tzl"),
    ScenarioConfig(protocol="tzl", decoys_per_leg=1),
    ScenarioConfig(protocol="cdsqc1"),
    ScenarioConfig(protocol="cdsqc2"),
)
DERIVED_SCENARIOS = (ScenarioConfig(protocol="cdsqc1", shared_rule=True),)


def canonical_summaries(seed: int = 0, include_derived: bool = False) -> list[ScenarioSummary]:
    configs = CANONICAL_SCENARIOS + (DERIVED_SCENARIOS if include_derived else ())
    return [run_scenario(replace(c, seed=seed))[1] for c in configs]


def report_rows(summaries: list[ScenarioSummary]) -> list[dict]:
    rows = []
    for s in summaries:
        c, q, b = s.ledger.as_tuple()
        rows.append(
            {
                "protocol": s.label,
                "c": _num(c),
                "q": _num(q),
                "b": _num(b),
                "eta": float(s.eta),
                "eta_percent": round(100 * float(s.eta), 2),
                "note": "derived scenario" if s.derived else "",
            }
        )
    rows.sort(key=lambda r: -r["eta"])
    return rows


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


def render_report(summaries: list[ScenarioSummary], fmt: str = "text") -> str:
    """Efficiency comparison, highest eta first, as text or JSON lines."""
    rows = report_rows(summaries)
    if fmt == "jsonl":
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in rows)
    if fmt != "text":
        raise ConfigurationError("format", f"unknown report format {fmt!r}")
    header = f"{'protocol':<22}{'c':>4}{'q':>6}{'b':>6}{'eta %':>9}  note"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(f"{r['protocol']:<22}{r['c']:>4}{r['q']:>6}{r['b']:>6}{r['eta_percent']:>9.2f}  {r['note']}".rstrip())
    return "\n".join(lines) + "\n"
