"""Per-problem scoring and the correlation / abstention evaluation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..clustering import CheckConfig, ClusterSet, InconclusivePolicy, cluster_programs
from ..errors import DegenerateDataError, UsageError
from ..interp import correctness_score
from ..metrics import (
    DEFAULT_GAMMA,
    METRICS,
    IterativeRecord,
    Mode,
    llm_probability,
    mutual_information,
    response_distribution,
    semantic_entropy,
)
from ..nodes import Program
from .abstention import AbstentionReport, ScoredProblem, abstention_eval
from .dataset import ProblemRecord, parse_against
from .stats import pearson


@dataclass(frozen=True)
class ScoreSettings:
    metric: str = "se-uniform"
    check: CheckConfig = CheckConfig()
    policy: InconclusivePolicy = InconclusivePolicy.MERGE
    gamma: float = DEFAULT_GAMMA
    prob_mode: Mode = Mode.LENGTH_NORMALIZED

    def __post_init__(self):
        if self.metric not in METRICS:
            raise UsageError(f"unknown metric {self.metric!r}; choose from {', '.join(METRICS)}")
        if self.gamma <= 0:
            raise UsageError("gamma must be positive")


def uncertainty_of(metric: str, score: float) -> float:
    """Map a metric value onto 'higher means less trustworthy'."""
    return -score if metric == "llm-prob" else score


def top_correctness(record: ProblemRecord, step_budget: int) -> float:
    top = record.response(record.top_ranked)
    parsed = parse_against(top.snippet, record.signature)
    if parsed.program is None:
        return 0.0
    return correctness_score(parsed.program, record.tests, step_budget)


def _cluster(record: ProblemRecord, ids_and_snippets, settings: ScoreSettings) -> ClusterSet:
    items: List[Tuple[str, Optional[Program]]] = []
    reasons: Dict[str, str] = {}
    for snippet in ids_and_snippets:
        parsed = parse_against(snippet, record.signature)
        items.append((parsed.id, parsed.program))
        if parsed.reason:
            reasons[parsed.id] = parsed.reason
    return cluster_programs(items, settings.check, settings.policy, reasons)


def score_problem(record: ProblemRecord, settings: ScoreSettings) -> dict:
    metric = settings.metric
    initial = [r.snippet for r in record.responses]
    probs = [r.prob for r in record.responses]

    if metric.startswith("mi-"):
        missing = [r.id for r in record.responses if not r.followups]
        if missing:
            raise UsageError(
                f"metric {metric} needs follow-up responses; problem {record.id!r} has none for {', '.join(missing)}"
            )
        snippets = initial + [f.snippet for r in record.responses for f in r.followups]
        clusters = _cluster(record, snippets, settings)
        mode = Mode.UNIFORM if metric == "mi-uniform" else Mode.LENGTH_NORMALIZED
        followups = {r.id: [f.prob for f in r.followups] for r in record.responses}
        score = mutual_information(IterativeRecord(probs, followups), clusters, mode, settings.gamma, settings.gamma)
    else:
        clusters = _cluster(record, initial, settings)
        if metric == "se-norm":
            score = semantic_entropy(clusters, response_distribution(probs, Mode.LENGTH_NORMALIZED))
        elif metric == "se-uniform":
            score = semantic_entropy(clusters, response_distribution(probs, Mode.UNIFORM))
        elif metric == "cc":
            score = len(clusters.clusters)
        else:
            score = llm_probability(record.response(record.top_ranked).prob, settings.prob_mode)

    row = {
        "problem_id": record.id,
        "metric": metric,
        "score": score,
        "cluster_count": len(clusters.clusters),
        "correctness": top_correctness(record, settings.check.step_budget),
    }
    if record.difficulty is not None:
        row["difficulty"] = record.difficulty
    cluster_record = clusters.to_record(record.id)
    row["clusters"] = cluster_record["clusters"]
    row["verdicts"] = cluster_record["verdicts"]
    if clusters.invalid:
        row["invalid"] = dict(sorted(clusters.invalid.items()))
    return row


def _score_one(args):
    record, settings = args
    return score_problem(record, settings)


def score_dataset(records: Sequence[ProblemRecord], settings: ScoreSettings, jobs: int = 1) -> List[dict]:
    """Score every problem; rows come back in dataset order whatever ``jobs`` is."""
    if settings.metric.startswith("mi-"):
        for record in records:
            if not record.has_followups:
                raise UsageError(f"metric {settings.metric} needs follow-up responses; problem {record.id!r} has none")
    work = [(r, settings) for r in records]
    if jobs <= 1 or len(work) <= 1:
        return [_score_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_score_one, work))


def _abstention_dict(report: AbstentionReport) -> dict:
    out = asdict(report)
    out["fold_results"] = [asdict(f) for f in report.fold_results]
    return out


def summarize(
    rows: Sequence[dict],
    correctness_threshold: float = 0.9,
    folds: int = 2,
    seed: int = 0,
    per_class: bool = False,
) -> dict:
    """Pearson correlation of score vs correctness plus the abstention report."""
    if not rows:
        raise UsageError("no problems to evaluate")
    metric = rows[0]["metric"]
    corr = pearson([r["score"] for r in rows], [r["correctness"] for r in rows])
    scored = [ScoredProblem(r["problem_id"], uncertainty_of(metric, r["score"]), r["correctness"]) for r in rows]
    summary = {
        "metric": metric,
        "n": corr.n,
        "r": corr.r,
        "p_value": corr.p_value,
        "correctness_threshold": correctness_threshold,
        "abstention": _abstention_dict(abstention_eval(scored, correctness_threshold, folds, seed)),
    }
    if per_class:
        classes: Dict[str, List[ScoredProblem]] = {}
        for row, s in zip(rows, scored):
            classes.setdefault(row.get("difficulty", "unclassified"), []).append(s)
        summary["per_class"] = {name: _class_report(items, correctness_threshold, folds, seed)
                                for name, items in sorted(classes.items())}
    return summary


def _class_report(items: List[ScoredProblem], threshold: float, folds: int, seed: int) -> dict:
    # a class with one label (or too few samples) is reported, not fatal
    try:
        return _abstention_dict(abstention_eval(items, threshold, folds, seed))
    except (UsageError, DegenerateDataError) as exc:
        return {"n": len(items), "error": str(exc)}
