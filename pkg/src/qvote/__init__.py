"""Simulator for the TZL quantum voting protocol and two CDSQC-based voting protocols."""

from qvote.cdsqc import Protocol1Config, Protocol2Config, protocol1_run, protocol2_run
from qvote.decoy import EavesdropperModel
from qvote.efficiency import ResourceLedger, eta, ledger_from_transcript
from qvote.kernels import BACKEND
from qvote.qstate import MeasurementBasis, StateVector
from qvote.scenario import ScenarioConfig, render_report, run_scenario
from qvote.states import BellLabel, GhzLabel, GhzLikeSpec, PauliOp
from qvote.transcript import ProtocolTranscript
from qvote.tzl import VotingRule, run_tzl_voting, tzl_controlled_teleport

__all__ = [
    "BACKEND",
    "BellLabel",
    "EavesdropperModel",
    "GhzLabel",
    "GhzLikeSpec",
    "MeasurementBasis",
    "PauliOp",
    "Protocol1Config",
    "Protocol2Config",
    "ProtocolTranscript",
    "ResourceLedger",
    "ScenarioConfig",
    "StateVector",
    "VotingRule",
    "eta",
    "ledger_from_transcript",
    "protocol1_run",
    "protocol2_run",
    "render_report",
    "run_scenario",
    "run_tzl_voting",
    "tzl_controlled_teleport",
]
