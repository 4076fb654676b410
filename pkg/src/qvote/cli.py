"""Command-line entry point: ``qvote run | attack | report``.

Exit codes: 0 success, 2 configuration error, 3 protocol abort,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from qvote.errors import AuthenticationError, ConfigurationError, QVoteError
from qvote.scenario import (
    ATTACKS,
    CHANNEL_ADVERSARIES,
    PROTOCOLS,
    ScenarioConfig,
    canonical_summaries,
    render_report,
    run_scenario,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_CONSISTENCY = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _scenario_flags(p: argparse.ArgumentParser, adversaries, default_adversary):
    p.add_argument("--protocol", choices=PROTOCOLS, default="tzl")
    p.add_argument("--n-voters", type=int, default=3)
    p.add_argument("--votes", default="random", help="bit string such as 1101, or 'random'")
    p.add_argument("--adversary", choices=adversaries, default=default_adversary)
    p.add_argument("--adversary-leg", default=None)
    p.add_argument("--decoys-per-leg", type=int, default=None)
    p.add_argument("--abort-threshold", type=float, default=0.11)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--shared-rule", action="store_true")
    p.add_argument("--eve-vote", type=int, default=1)
    p.add_argument("--workers", type=int, default=1, help="processes for --trials fan-out")
    p.add_argument("--transcript", metavar="PATH", help="write the first trial's transcript as JSON lines")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qvote", description="Quantum voting protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one voting scenario")
    _scenario_flags(run, CHANNEL_ADVERSARIES, "none")
    run.add_argument("--seed", type=int, required=True)

    attack = sub.add_parser("attack", help="run an attack against a protocol")
    _scenario_flags(attack, ATTACKS, "separable")
    attack.add_argument("--seed", type=int, default=0)

    report = sub.add_parser("report", help="efficiency comparison of the canonical scenarios")
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--format", choices=("text", "jsonl"), default="text")
    report.add_argument("--include-derived", action="store_true", help="add the shared-rule cdsqc1 scenario")
    return parser


def _config(args) -> ScenarioConfig:
    return ScenarioConfig(
        protocol=args.protocol,
        n_voters=args.n_voters,
        votes=args.votes,
        seed=args.seed,
        adversary=args.adversary,
        adversary_leg=args.adversary_leg,
        decoys_per_leg=args.decoys_per_leg,
        abort_threshold=args.abort_threshold,
        trials=args.trials,
        shared_rule=args.shared_rule,
        eve_vote=args.eve_vote,
    )


def _run(args, out) -> int:
    transcript, summary = run_scenario(_config(args), workers=args.workers)
    if args.transcript:
        transcript.write(args.transcript)
    out.write(json.dumps(summary.to_dict(), sort_keys=True) + "\n")
    if args.command == "run" and summary.aborts:
        return EXIT_ABORT
    return EXIT_OK


def _report(args, out) -> int:
    summaries = canonical_summaries(args.seed, include_derived=args.include_derived)
    out.write(render_report(summaries, args.format))
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _report(args, out)
        return _run(args, out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AuthenticationError as exc:
        print(f"protocol abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except QVoteError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
