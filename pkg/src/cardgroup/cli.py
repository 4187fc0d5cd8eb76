"""Command-line interface.

Exit codes: 0 success or pass, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys

from . import oracle
from .chisq import SIGNIFICANCES
from .errors import BadConstraint, InsufficientSamples, TooLargeForOracle
from .grouping import load_constraint, run_secure_grouping

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

MAX_SEED = 2**64 - 1


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardgroup", description="Card-based secure grouping")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p, seed_required=False):
        p.add_argument("--constraint", required=True, help="constraint file")
        if seed_required:
            p.add_argument("--seed", type=_seed, required=True)
        else:
            p.add_argument("--seed", type=_seed, default=0)

    run = sub.add_parser("run", help="run one grouping session")
    common(run, seed_required=True)
    run.add_argument("--player", type=_positive, help="print only this player's view")
    run.add_argument("--transcript", help="write the public transcript here")
    run.add_argument("--unsafe-secrets", action="store_true", help="also print hidden permutations")

    for name in ("verify-uniformity", "verify-independence"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--trials", type=_positive, required=True)
        p.add_argument("--significance", type=float, choices=SIGNIFICANCES, default=0.001)
        p.add_argument("--workers", type=_positive, default=1)
        p.add_argument("--report", help="append report stanzas here")
        if name == "verify-independence":
            p.add_argument("--player", type=_positive, default=1, help="observing player")
            p.add_argument("--buckets", type=_positive, default=6, help="transcript hash classes")

    enum = sub.add_parser("enumerate", help="oracle enumeration and fiber table")
    common(enum)
    enum.add_argument("--report")

    count = sub.add_parser("card-count", help="number cards used")
    common(count)
    return parser


def _role(c, group) -> str:
    dummies = [a for a in sorted(group) if a in c.dummies]
    if not dummies:
        return ""
    names = [c.dummies[a] if c.dummies[a] != str(a) else f"dummy {a}" for a in dummies]
    return " [" + ", ".join(names) + "]"


def cmd_run(args, out) -> int:
    c = load_constraint(args.constraint)
    run = run_secure_grouping(c, args.seed)
    players = [i for i in range(1, c.n + 1) if i not in c.dummies]
    if args.player is not None:
        if args.player not in players:
            print(f"error: no player {args.player}", file=sys.stderr)
            return EXIT_INPUT
        players = [args.player]
    for i in players:
        view = run.views[i]
        print(view.render() + _role(c, view.group), file=out)
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(run.transcript.serialize())
    if args.unsafe_secrets:
        print(f"secret tau = {run.tau}", file=out)
        print(f"secret sigma = {run.sigma()}", file=out)
        print(f"secret rho = {run.rho()}", file=out)
        print(f"secret grouping = {run.grouping}", file=out)
        if run.secret_log is not None:
            out.write(run.secret_log.serialize())
    return EXIT_OK


def _emit(stanzas, args, out):
    text = "".join(stanzas)
    out.write(text)
    if getattr(args, "report", None):
        with open(args.report, "a", encoding="utf-8") as fh:
            fh.write(text)


def cmd_verify(args, out, source_factory=None) -> int:
    c = load_constraint(args.constraint)
    outcomes = oracle.simulate(c, args.trials, args.seed, args.workers, source_factory)
    if args.mode == "verify-uniformity":
        results = [oracle.uniformity_test([o[0] for o in outcomes], c, args.significance)]
    else:
        results = [
            oracle.partner_uniformity(c, outcomes, args.player, args.significance),
            oracle.transcript_independence_test(
                c, args.trials, args.player, args.seed, args.significance,
                buckets=args.buckets, outcomes=outcomes,
            ),
        ]
    _emit([r.stanza() for r in results], args, out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_enumerate(args, out) -> int:
    c = load_constraint(args.constraint)
    report = oracle.fiber_report(c)
    _emit([report.render()], args, out)
    return EXIT_OK if report.fibers_equal and report.matches_oracle else EXIT_FAIL


def cmd_card_count(args, out) -> int:
    c = load_constraint(args.constraint)
    d = c.max_group_size
    print(f"cards = {oracle.card_count(c)}", file=out)
    print(f"max_group_size = {d}", file=out)
    print(f"bound_3dn = {3 * d * c.n}", file=out)
    return EXIT_OK


def main(argv=None, out=None, source_factory=None) -> int:
    """Entry point.  ``source_factory`` swaps the per-trial random source (tests only)."""
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.mode == "run":
            return cmd_run(args, out)
        if args.mode in ("verify-uniformity", "verify-independence"):
            return cmd_verify(args, out, source_factory)
        if args.mode == "enumerate":
            return cmd_enumerate(args, out)
        return cmd_card_count(args, out)
    except BadConstraint as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, InsufficientSamples, TooLargeForOracle) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
