"""Abstention policies: accept a response iff its uncertainty is at most a threshold.

The threshold is fitted to maximise accuracy on a training split and scored
on held-out folds.  FP and FN rates are fractions of all validation
samples, so accuracy + FP + FN is 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from ..errors import DegenerateDataError, UsageError


@dataclass(frozen=True)
class ScoredProblem:
    problem_id: str
    uncertainty: float
    correctness: float


@dataclass(frozen=True)
class Labeled:
    problem_id: str
    uncertainty: float
    correct: bool


@dataclass(frozen=True)
class FoldResult:
    threshold: float
    size: int
    accuracy: float
    false_positive_rate: float
    false_negative_rate: float


@dataclass(frozen=True)
class AbstentionReport:
    threshold: float
    accuracy: float
    false_positive_rate: float
    false_negative_rate: float
    folds: int
    seed: int
    samples: int
    fold_results: Tuple[FoldResult, ...] = field(default=())


def label_correctness(scored: Sequence[ScoredProblem], correctness_threshold: float = 0.9) -> List[Labeled]:
    """A response is correct iff its correctness score strictly exceeds the threshold."""
    if not 0.0 <= correctness_threshold <= 1.0:
        raise UsageError("correctness threshold must lie in [0, 1]")
    return [Labeled(s.problem_id, s.uncertainty, s.correctness > correctness_threshold) for s in scored]


def downsample(labeled: Sequence[Labeled], seed: int = 0) -> List[Labeled]:
    """Randomly drop majority-class samples until both labels are equally frequent.

    The survivors keep their original relative order.
    """
    pos = [i for i, s in enumerate(labeled) if s.correct]
    neg = [i for i, s in enumerate(labeled) if not s.correct]
    if not pos or not neg:
        raise UsageError("downsampling needs at least one sample of each label")
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
    kept = set(minority) | set(random.Random(seed).sample(majority, len(minority)))
    return [s for i, s in enumerate(labeled) if i in kept]


def confusion(samples: Sequence[Labeled], threshold: float) -> Tuple[float, float, float]:
    """(accuracy, FP rate, FN rate) of the rule 'accept iff uncertainty <= threshold'."""
    n = len(samples)
    fp = sum(1 for s in samples if s.uncertainty <= threshold and not s.correct)
    fn = sum(1 for s in samples if s.uncertainty > threshold and s.correct)
    return (n - fp - fn) / n, fp / n, fn / n


def candidate_thresholds(values: Sequence[float]) -> List[float]:
    distinct = sorted(set(values))
    mids = [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    return [distinct[0] - 1.0, *mids, distinct[-1] + 1.0]


def fit_threshold(train: Sequence[Labeled]) -> float:
    """Accuracy-maximising threshold; the smallest one wins ties."""
    if not train:
        raise DegenerateDataError("cannot fit a threshold on an empty training set")
    if all(s.correct for s in train) or not any(s.correct for s in train):
        raise DegenerateDataError("training data holds a single label; the threshold is degenerate")
    best, best_acc = None, -1.0
    for t in candidate_thresholds([s.uncertainty for s in train]):
        acc = confusion(train, t)[0]
        if acc > best_acc:
            best, best_acc = t, acc
    return best


def abstention_eval(
    scored: Sequence[ScoredProblem],
    correctness_threshold: float = 0.9,
    folds: int = 2,
    seed: int = 0,
) -> AbstentionReport:
    """Downsample, shuffle, and cross-validate the fitted abstention threshold."""
    if folds < 2:
        raise UsageError("cross-validation needs at least 2 folds")
    labeled = label_correctness(scored, correctness_threshold)
    balanced = downsample(labeled, seed)
    if len(balanced) < folds:
        raise UsageError(f"{len(balanced)} balanced samples cannot fill {folds} folds")
    order = list(balanced)
    random.Random(seed).shuffle(order)
    parts = [order[k::folds] for k in range(folds)]

    results = []
    for k in range(folds):
        train = [s for j, part in enumerate(parts) if j != k for s in part]
        if all(s.correct for s in train) or not any(s.correct for s in train):
            raise UsageError(f"fold {k}: training split lacks one of the labels; infeasible fold sizes")
        t = fit_threshold(train)
        acc, fp, fn = confusion(parts[k], t)
        results.append(FoldResult(t, len(parts[k]), acc, fp, fn))

    total = sum(r.size for r in results)
    return AbstentionReport(
        threshold=fit_threshold(balanced),
        accuracy=sum(r.accuracy * r.size for r in results) / total,
        false_positive_rate=sum(r.false_positive_rate * r.size for r in results) / total,
        false_negative_rate=sum(r.false_negative_rate * r.size for r in results) / total,
        folds=folds,
        seed=seed,
        samples=len(balanced),
        fold_results=tuple(results),
    )
