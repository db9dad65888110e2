"""Command-line interface.

Subcommands:
  curve      analytic success/advantage curves as CSV (optionally a figure)
  simulate   Monte Carlo estimates vs. closed forms as comparison CSV
  verify     full oracle suite with one pass/fail line per check
  crossover  the disturbance where the one-way attack overtakes the average
             two-way attack

Exit codes: 0 success; 1 invalid arguments; 2 verify found a failing check;
3 runtime failure (a round with too few sifted bits).  Output goes to
stdout unless --out is given; identical argv and seed give byte-identical
output.
"""

from __future__ import annotations

import argparse
import sys

from .analytic import D_from_p, crossover_disturbance, sample_curve
from .channel import CombinationMode
from .errors import InsufficientBitsError
from .experiments import (
    ComparisonRow,
    Quantity,
    StrategyKind,
    analytic_success,
    build_strategy,
    comparisons_csv,
    curves_csv,
    estimate_disturbance,
    estimate_success,
    induced_disturbance,
    verify_all,
)
from .protocol import (
    EveNone,
    EveOneWay,
    EveTwoWay,
    ProtocolConfig,
    Variant,
    resolve_strategy,
    run_protocol,
    transcript_csv,
)

_VARIANTS = {
    "classical": Variant.CLASSICAL_BOB,
    "hadamard": Variant.HADAMARD_BOB,
}
_MODES = {
    "paper": CombinationMode.PAPER_WEIGHTS,
    "independent": CombinationMode.INDEPENDENT,
}
_STRATEGIES = {
    "none": StrategyKind.NONE,
    "one-way": StrategyKind.ONE_WAY,
    "two-way": StrategyKind.TWO_WAY,
    "auto": StrategyKind.AUTO,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sqkd-eve",
        description=(
            "Semiquantum key distribution with an interactive eavesdropper: "
            "analytic curves, Monte Carlo protocol runs, and oracle checks."
        ),
    )
    subparsers = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    subparsers.required = True

    curve = subparsers.add_parser(
        "curve", help="emit success and advantage curves as CSV"
    )
    curve.add_argument("--steps", type=int, default=101, help="grid points (>= 2)")
    curve.add_argument("--dmin", type=float, default=0.0, help="lowest disturbance")
    curve.add_argument("--dmax", type=float, default=0.5, help="highest disturbance")
    curve.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
    curve.add_argument(
        "--plot",
        metavar="FILE",
        help="also render the two-panel advantage figure to this file",
    )
    curve.set_defaults(handler=_cmd_curve)

    simulate = subparsers.add_parser(
        "simulate", help="estimate attacker accuracy and disturbance empirically"
    )
    simulate.add_argument(
        "--variant", choices=sorted(_VARIANTS), default="classical",
        help="Bob's behaviour on measured bits",
    )
    simulate.add_argument(
        "--eve", choices=["none", "one-way", "two-way", "auto"], default="none",
        help="attack model",
    )
    d_group = simulate.add_mutually_exclusive_group()
    d_group.add_argument("--D", type=float, help="target disturbance in [0, 0.5]")
    d_group.add_argument(
        "--p", type=float,
        help="per-transit flip probability (two-way attack only); D = 2p(1-p)",
    )
    simulate.add_argument(
        "--mode", choices=sorted(_MODES), default="paper",
        help="how the two-way attack combines its two observations",
    )
    simulate.add_argument("--trials", type=int, default=100_000,
                          help="INFO bits to score (>= 10000)")
    simulate.add_argument("--n", type=int, default=256,
                          help="key length for the transcript round")
    simulate.add_argument("--delta", type=float, default=1.0,
                          help="oversampling margin for the transcript round")
    simulate.add_argument("--threshold-ctrl-z", type=float, default=0.11)
    simulate.add_argument("--threshold-ctrl-x", type=float, default=0.11)
    simulate.add_argument("--threshold-test", type=float, default=0.11)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", metavar="FILE",
                          help="write comparison CSV here instead of stdout")
    simulate.add_argument(
        "--transcript", metavar="FILE",
        help="also run one full round and write its per-bit transcript CSV",
    )
    simulate.set_defaults(handler=_cmd_simulate)

    verify = subparsers.add_parser(
        "verify", help="run every oracle check and report pass/fail"
    )
    verify.add_argument("--grid-size", type=int, default=1000,
                        help="points for the identity grid (>= 2)")
    verify.add_argument("--trials", type=int, default=1_000_000,
                        help="Monte Carlo bits per comparison (>= 10000)")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--mode", choices=sorted(_MODES), default="paper")
    verify.add_argument("--out", metavar="FILE",
                        help="write the report here instead of stdout")
    verify.set_defaults(handler=_cmd_verify)

    crossover = subparsers.add_parser(
        "crossover", help="print the disturbance where the attacks swap rank"
    )
    crossover.add_argument("--out", metavar="FILE",
                           help="write the value here instead of stdout")
    crossover.set_defaults(handler=_cmd_crossover)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _cmd_curve(args) -> int:
    points = sample_curve(args.dmin, args.dmax, args.steps)
    if args.plot is not None:
        from .experiments import advantage_tables
        from .plots import save_advantage_figure

        magnified = advantage_tables().magnified
        save_advantage_figure(tuple(points), magnified, args.plot)
    _emit(curves_csv(points), args.out)
    return 0


def _success_quantity(eve, variant: Variant) -> Quantity:
    if isinstance(eve, EveOneWay):
        return Quantity.PE1
    if variant is Variant.HADAMARD_BOB:
        return Quantity.PE2_AVG_H
    return Quantity.PE2_AVG


def _cmd_simulate(args) -> int:
    parser_error = None
    if args.p is not None and args.eve != "two-way":
        parser_error = "--p applies only to --eve two-way; give --D instead"
    elif args.eve != "none" and args.D is None and args.p is None:
        parser_error = f"--eve {args.eve} needs a disturbance: give --D or --p"
    if parser_error is not None:
        sys.stderr.write(f"sqkd-eve simulate: error: {parser_error}\n")
        return 1

    D = D_from_p(args.p) if args.p is not None else (args.D or 0.0)
    variant = _VARIANTS[args.variant]
    mode = _MODES[args.mode]
    kind = _STRATEGIES[args.eve]
    eve = build_strategy(kind, D, mode)

    # The transcript round honours the protocol flags (n, delta,
    # thresholds) and runs first so a shortfall fails before any output.
    if args.transcript is not None:
        config = ProtocolConfig(
            variant=variant,
            n=args.n,
            delta=args.delta,
            ctrl_threshold_z=args.threshold_ctrl_z,
            ctrl_threshold_x=args.threshold_ctrl_x,
            test_threshold=args.threshold_test,
            eve=eve,
            seed=args.seed,
        )
        result = run_protocol(config, run_index=0, keep_transcript=True)
        with open(args.transcript, "w", encoding="utf-8", newline="") as handle:
            handle.write(transcript_csv(result.transcript))

    rows = []
    if not isinstance(eve, EveNone):
        quantity = _success_quantity(resolve_strategy(eve), variant)
        empirical = estimate_success(kind, variant, D, args.trials, args.seed, mode)
        rows.append(
            ComparisonRow.build(D, quantity, analytic_success(quantity, D), empirical)
        )
    test_est, ctrl_est = estimate_disturbance(variant, eve, args.trials, args.seed)
    target = induced_disturbance(eve)
    rows.append(ComparisonRow.build(D, Quantity.DISTURBANCE_TEST, target, test_est))
    rows.append(ComparisonRow.build(D, Quantity.DISTURBANCE_CTRL, target, ctrl_est))

    _emit(comparisons_csv(rows), args.out)
    return 0


def _cmd_verify(args) -> int:
    report = verify_all(
        grid_size=args.grid_size,
        trials=args.trials,
        seed=args.seed,
        mode=_MODES[args.mode],
    )
    _emit(report.render(), args.out)
    return 0 if report.all_passed else 2


def _cmd_crossover(args) -> int:
    _emit(f"{crossover_disturbance():.6f}\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except InsufficientBitsError as exc:
        sys.stderr.write(f"sqkd-eve: error: {exc}\n")
        return 3
    except ValueError as exc:
        # Domain validation failures from any module land here.
        sys.stderr.write(f"sqkd-eve: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
