"""Command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 dataset load error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .clustering import CheckConfig, InconclusivePolicy, cluster_programs
from .errors import DatasetError, DegenerateDataError, UsageError
from .evalkit.dataset import load_dataset
from .evalkit.pipeline import ScoreSettings, score_dataset, summarize, top_correctness
from .interp import DEFAULT_STEP_BUDGET, evaluate
from .lang import SnipSyntaxError, parse_program
from .metrics import DEFAULT_GAMMA, METRICS, Mode
from .symexec import Caps, InputDomain, brute_force_equivalence, check_equivalence

EXIT_OK, EXIT_USAGE, EXIT_DATASET, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for dataset errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_bounds(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("bounds")
    g.add_argument("--int-bound", type=int, default=8, help="int inputs range over [-B, B]")
    g.add_argument("--max-array-len", type=int, default=4, help="largest array length explored")
    g.add_argument("--elem-bound", type=int, default=4, help="array elements range over [-E, E]")
    g.add_argument("--unroll-cap", type=int, default=32, help="iterations unrolled per loop entry")
    g.add_argument("--trace-cap", type=int, default=4096, help="traces per program before giving up")
    g.add_argument("--pair-timeout-ms", type=int, default=10000, help="time budget per equivalence check")
    g.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET, help="interpreter step budget")


def _add_clustering(p: argparse.ArgumentParser) -> None:
    _add_bounds(p)
    p.add_argument(
        "--inconclusive-policy", choices=[x.value for x in InconclusivePolicy], default="merge",
        help="treat Inconclusive pairs as equivalent (merge) or not (separate)",
    )


def _add_scoring(p: argparse.ArgumentParser) -> None:
    p.add_argument("dataset", help="dataset JSON file")
    p.add_argument("--metric", default="se-uniform", help=f"one of {', '.join(METRICS)}")
    p.add_argument(
        "--mode", choices=["length-normalized", "raw"], default="length-normalized",
        help="probability of the top response for llm-prob",
    )
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA, help="MI stabilisation constant")
    p.add_argument("--seed", type=int, default=0, help="seed for downsampling and fold shuffles")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes over problems")
    p.add_argument("--out", help="report path (default: next to the dataset)")
    _add_clustering(p)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="symclust", description="Symbolic clustering of candidate programs.", formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a snippet on one input", formatter_class=fmt)
    p.add_argument("file", help="SnipLang source file")
    p.add_argument("--input", default="[]", help="JSON array of arguments, e.g. '[[1,2], 3]'")
    p.add_argument("--budget", type=int, default=DEFAULT_STEP_BUDGET, help="interpreter step budget")

    p = sub.add_parser("equiv", help="check two snippets for bounded equivalence", formatter_class=fmt)
    p.add_argument("file_a", help="first SnipLang file")
    p.add_argument("file_b", help="second SnipLang file")
    p.add_argument("--mode", choices=["symbolic", "brute"], default="symbolic", help="checking strategy")
    _add_bounds(p)

    p = sub.add_parser("cluster", help="cluster snippet files into semantic classes", formatter_class=fmt)
    p.add_argument("files", nargs="+", help="SnipLang files sharing one signature")
    p.add_argument("--out", help="also write the cluster record as JSON here")
    _add_clustering(p)

    p = sub.add_parser("score", help="per-problem uncertainty scores for a dataset", formatter_class=fmt)
    _add_scoring(p)

    p = sub.add_parser("evaluate", help="score, correlate with correctness, fit abstention", formatter_class=fmt)
    _add_scoring(p)
    p.add_argument("--correctness-threshold", type=float, default=0.9, help="correct iff score exceeds this")
    p.add_argument("--folds", type=int, default=2, help="cross-validation folds")
    p.add_argument("--per-class", action="store_true", help="also fit abstention per difficulty class")

    p = sub.add_parser("correctness", help="test-pass rate of each top-ranked response", formatter_class=fmt)
    p.add_argument("dataset", help="dataset JSON file")
    p.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET, help="interpreter step budget")
    return parser


def _read_program(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return parse_program(text)
    except SnipSyntaxError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _positive(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) <= 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


def _config(args) -> CheckConfig:
    _positive(args, "unroll_cap", "trace_cap", "pair_timeout_ms", "step_budget")
    if min(args.int_bound, args.max_array_len, args.elem_bound) < 0:
        raise UsageError("domain bounds must be nonnegative")
    return CheckConfig(
        InputDomain(args.int_bound, args.max_array_len, args.elem_bound),
        Caps(args.unroll_cap, args.trace_cap),
        args.pair_timeout_ms / 1000.0,
        args.step_budget,
    )


def _settings(args) -> ScoreSettings:
    return ScoreSettings(
        metric=args.metric,
        check=_config(args),
        policy=InconclusivePolicy(args.inconclusive_policy),
        gamma=args.gamma,
        prob_mode=Mode.RAW if args.mode == "raw" else Mode.LENGTH_NORMALIZED,
    )


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _report_path(args, kind: str) -> Path:
    if args.out:
        return Path(args.out)
    ds = Path(args.dataset)
    return ds.with_name(f"{ds.stem}.{args.metric}.{kind}.json")


def cmd_run(args) -> int:
    _positive(args, "budget")
    program = _read_program(args.file)
    try:
        inputs = json.loads(args.input)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--input is not valid JSON: {exc.msg}") from None
    if not isinstance(inputs, list):
        raise UsageError("--input must be a JSON array of arguments")
    try:
        outcome = evaluate(program, inputs, args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(outcome)
    return EXIT_OK


def cmd_equiv(args) -> int:
    config = _config(args)
    p, q = _read_program(args.file_a), _read_program(args.file_b)
    if args.mode == "brute":
        verdict = brute_force_equivalence(p, q, config.dom, config.step_budget)
    else:
        verdict = check_equivalence(p, q, config.dom, config.caps, config.time_budget, config.step_budget)
    print(verdict)
    return EXIT_OK


def cmd_cluster(args) -> int:
    config = _config(args)
    items = [(f, _read_program(f)) for f in args.files]
    result = cluster_programs(items, config, InconclusivePolicy(args.inconclusive_policy))
    for k, members in enumerate(result.clusters):
        print(f"cluster {k}: {' '.join(members)}")
    for a, b in result.conflicts:
        print(f"conflict: {a} and {b} are NotEquivalent but share a cluster")
    if args.out:
        _write_json(Path(args.out), result.to_record("cli"))
    return EXIT_OK


def _score_rows(args):
    settings = _settings(args)
    _positive(args, "jobs")
    records = load_dataset(args.dataset)
    return score_dataset(records, settings, args.jobs)


def cmd_score(args) -> int:
    rows = _score_rows(args)
    path = _report_path(args, "score")
    _write_json(path, {"problems": rows})
    for row in rows:
        print(f"{row['problem_id']}\t{row['metric']}={row['score']:.6g}\tclusters={row['cluster_count']}")
    print(f"report: {path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.folds < 2:
        raise UsageError("--folds must be at least 2")
    rows = _score_rows(args)
    summary = summarize(rows, args.correctness_threshold, args.folds, args.seed, args.per_class)
    path = _report_path(args, "evaluate")
    _write_json(path, {"problems": rows, "summary": summary})
    ab = summary["abstention"]
    print(f"pearson r={summary['r']:.4f} p={summary['p_value']:.4g} n={summary['n']}")
    print(
        f"abstention threshold={ab['threshold']:.6g} accuracy={ab['accuracy']:.4f} "
        f"fp={ab['false_positive_rate']:.4f} fn={ab['false_negative_rate']:.4f} "
        f"folds={ab['folds']} seed={ab['seed']}"
    )
    print(f"report: {path}")
    return EXIT_OK


def cmd_correctness(args) -> int:
    _positive(args, "step_budget")
    for record in load_dataset(args.dataset):
        print(f"{record.id}\t{record.top_ranked}\t{top_correctness(record, args.step_budget):.6g}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "equiv": cmd_equiv,
    "cluster": cmd_cluster,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "correctness": cmd_correctness,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except (UsageError, DegenerateDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
