"""Command-line front end.

    mlsamplesize size   --sens 0.85 --spec 0.75 --prev 0.20 --precision 0.05 --conf 0.95 --split 75:25
    mlsamplesize verify --config study.yaml --seed 42 --replications 10000
    mlsamplesize sweep  --config study.yaml --axis precision --values 0.04,0.05,0.06
    mlsamplesize schema

Exit codes: 0 success, 1 computation error, 2 input or validation error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .design import CONFIG_SCHEMA, StudyDesign, parse_config
from .errors import DesignError
from .mc_verifier import SimulationConfig, simulate_study
from .rational import to_fraction
from .report import OUTPUT_SCHEMA, SWEEP_AXES, SweepGrid, render_report, run_size, run_sweep
from .split_planner import SplitSpec
from .stats_kernel import ConfidenceSpec

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_INPUT = 2


class _InputError(Exception):
    pass


def _design_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("study design")
    g.add_argument("--config", type=Path, help="YAML/JSON design file")
    g.add_argument("--sens", help="anticipated sensitivity (0.85 or 85%%)")
    g.add_argument("--spec", help="anticipated specificity")
    g.add_argument("--prev", help="prevalence of the condition in the testing population")
    g.add_argument("--precision", help="target CI half-width d")
    g.add_argument("--conf", help="two-sided confidence level (default 0.95)")
    split = g.add_mutually_exclusive_group()
    split.add_argument("--split", help="train:test parts, e.g. 75:25")
    split.add_argument("--test-fraction", help="test share of the total, e.g. 0.25")
    g.add_argument("--val-fraction", help="share of the training allocation kept for validation")
    g.add_argument("--dropout", help="expected attrition, inflates the total")
    g.add_argument("--title", help="study title for reports")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("table", "structured", "csv"), default="table")
    o.add_argument("--out", type=Path, help="write the report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlsamplesize",
        description="Testing, training and total sample sizes for ML studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _design_parent()

    sub.add_parser("size", parents=[parent], help="compute the sample-size plan")

    verify = sub.add_parser("verify", parents=[parent], help="Monte Carlo check of a plan")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--replications", type=int, default=10000)
    verify.add_argument("--ci", choices=("wald", "wilson"), default="wald")
    verify.add_argument("--prevalence-mode", choices=("random", "fixed"), default="random")
    verify.add_argument("--n-test", type=int, help="simulate this testing-set size instead of the computed one")
    verify.add_argument("--workers", type=int, default=1)

    sweep = sub.add_parser("sweep", parents=[parent], help="recompute the plan over one axis")
    sweep.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEP_AXES)}")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--metric", help="restrict metric-level axes to this label")

    schema = sub.add_parser("schema", help="print the config and output JSON schemas")
    schema.add_argument("--which", choices=("config", "output", "both"), default="both")
    schema.add_argument("--out", type=Path)
    return parser


def design_from_args(args: argparse.Namespace) -> StudyDesign:
    metric_flags = [f for f in ("sens", "spec", "prev", "precision") if getattr(args, f) is not None]
    if args.config is not None:
        if metric_flags:
            raise _InputError(f"--{metric_flags[0]} cannot be combined with --config")
        design = parse_config(args.config)
    else:
        if args.sens is None and args.spec is None:
            raise _InputError("give --config or at least one of --sens/--spec")
        for flag in ("prev", "precision"):
            if getattr(args, flag) is None:
                raise _InputError(f"--{flag} is required with --sens/--spec")
        if args.split is None and args.test_fraction is None:
            raise _InputError("give --split <train>:<test> or --test-fraction <p>")
        split = _split_from_args(args, SplitSpec.ratio(1))
        design = StudyDesign.binary_diagnostic(
            args.sens, args.spec, args.prev, args.precision, split,
            confidence=args.conf if args.conf is not None else 0.95,
            dropout=args.dropout if args.dropout is not None else 0,
        )

    changes = {}
    if args.conf is not None:
        changes["confidence"] = ConfidenceSpec(float(to_fraction(args.conf)))
    if args.split is not None or args.test_fraction is not None or args.val_fraction is not None:
        changes["split"] = _split_from_args(args, design.split)
    if args.dropout is not None:
        changes["dropout"] = args.dropout
    if args.title is not None:
        changes["metadata"] = {**design.metadata, "title": args.title}
    return dataclasses.replace(design, **changes) if changes else design


def _split_from_args(args, current: SplitSpec) -> SplitSpec:
    validation = args.val_fraction if args.val_fraction is not None else current.validation_fraction
    if args.split is not None:
        return SplitSpec.from_parts(args.split, validation)
    if args.test_fraction is not None:
        return SplitSpec.test_fraction(args.test_fraction, validation)
    return dataclasses.replace(current, validation_fraction=validation)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "schema":
        schemas = {"config": CONFIG_SCHEMA, "output": OUTPUT_SCHEMA}
        doc = schemas if args.which == "both" else schemas[args.which]
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK

    try:
        design = design_from_args(args)
        if args.command == "verify":
            sim_config = SimulationConfig(
                seed=args.seed, replications=args.replications,
                ci_method=args.ci, prevalence_mode=args.prevalence_mode,
            )
            if args.n_test is not None and args.n_test < 1:
                raise _InputError(f"--n-test must be >= 1, got {args.n_test}")
        elif args.command == "sweep":
            grid = SweepGrid(args.axis, tuple(v for v in args.values.split(",") if v.strip()), args.metric)
    except (_InputError, DesignError, ValueError, TypeError) as exc:
        print(f"mlsamplesize: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        if args.command == "size":
            text = render_report(run_size(design), args.format, design=design)
        elif args.command == "verify":
            result = run_size(design)
            n_test = args.n_test if args.n_test is not None else result.n_test
            sim = simulate_study(design, n_test, sim_config, workers=args.workers)
            text = render_report(result, args.format, design=design, simulation=sim)
        else:
            text = render_report(run_sweep(design, grid), args.format)
    except DesignError as exc:
        print(f"mlsamplesize: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError) as exc:
        print(f"mlsamplesize: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION

    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
