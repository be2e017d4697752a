"""Dataset ingestion, correlation statistics and abstention evaluation."""

from .abstention import (
    AbstentionReport,
    FoldResult,
    Labeled,
    ScoredProblem,
    abstention_eval,
    candidate_thresholds,
    confusion,
    downsample,
    fit_threshold,
    label_correctness,
)
from .dataset import ProblemRecord, Response, Signature, decode, load_dataset, parse_against
from .pipeline import ScoreSettings, score_dataset, score_problem, summarize, top_correctness, uncertainty_of
from .stats import CorrelationResult, betainc, pearson

__all__ = [
    "AbstentionReport",
    "CorrelationResult",
    "FoldResult",
    "Labeled",
    "ProblemRecord",
    "Response",
    "ScoreSettings",
    "ScoredProblem",
    "Signature",
    "abstention_eval",
    "betainc",
    "candidate_thresholds",
    "confusion",
    "decode",
    "downsample",
    "fit_threshold",
    "label_correctness",
    "load_dataset",
    "parse_against",
    "pearson",
    "score_dataset",
    "score_problem",
    "summarize",
    "top_correctness",
    "uncertainty_of",
]
