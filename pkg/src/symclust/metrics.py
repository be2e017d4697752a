"""Uncertainty scores over semantic clusters.

All logarithms are natural.  Probabilities derived from model scores go
through a max-shifted softmax, so very negative log-probabilities of long
programs never underflow to an all-zero vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

from .clustering import ClusterSet
from .errors import UsageError

DEFAULT_GAMMA = 1e-10

METRICS = ("se-norm", "se-uniform", "mi-norm", "mi-uniform", "cc", "llm-prob")


class Mode(enum.Enum):
    LENGTH_NORMALIZED = "length_normalized"
    UNIFORM = "uniform"
    RAW = "raw"


@dataclass(frozen=True)
class ResponseProb:
    id: str
    total_logprob: float
    token_count: int


@dataclass(frozen=True)
class IterativeRecord:
    initial: Sequence[ResponseProb]
    # initial id -> responses generated with that initial response in context
    followups: Mapping[str, Sequence[ResponseProb]]


def length_normalize(r: ResponseProb) -> float:
    if r.token_count < 1:
        raise UsageError(f"response {r.id!r} has token_count {r.token_count}; need at least 1")
    return r.total_logprob / r.token_count


def softmax(values: Sequence[float]) -> List[float]:
    if not values:
        raise UsageError("softmax of an empty list")
    if not all(math.isfinite(v) for v in values):
        raise UsageError("softmax inputs must be finite")
    top = max(values)
    weights = [math.exp(v - top) for v in values]
    z = math.fsum(weights)
    return [w / z for w in weights]


def softmax_distribution(responses: Sequence[ResponseProb]) -> Dict[str, float]:
    """Length-normalised, softmax-normalised response probabilities."""
    probs = softmax([length_normalize(r) for r in responses])
    return {r.id: p for r, p in zip(responses, probs)}


def uniform_distribution(n: int) -> List[float]:
    if n < 1:
        raise UsageError("uniform distribution needs n >= 1")
    return [1.0 / n] * n


def response_distribution(responses: Sequence[ResponseProb], mode: Mode) -> Dict[str, float]:
    if mode is Mode.UNIFORM:
        return {r.id: p for r, p in zip(responses, uniform_distribution(len(responses)))}
    return softmax_distribution(responses)


def cluster_masses(clusters: ClusterSet, dist: Mapping[str, float]) -> List[float]:
    ids = {sid for members in clusters.clusters for sid in members}
    if ids != set(dist):
        missing = sorted(ids ^ set(dist))
        raise UsageError(f"distribution and clusters cover different ids: {', '.join(missing)}")
    return [math.fsum(dist[sid] for sid in members) for members in clusters.clusters]


def entropy(masses: Sequence[float]) -> float:
    """Shannon entropy of ``masses`` after normalising them to sum to 1.

    Normalising first makes a single cluster come out at exactly 0.0 even
    when softmax rounding leaves its mass a few ulps away from 1.
    """
    z = math.fsum(masses)
    if z <= 0.0:
        raise UsageError("entropy of a distribution with no mass")
    # 0.0 - x keeps the single-cluster case at +0.0 rather than -0.0
    return 0.0 - math.fsum((m / z) * math.log(m / z) for m in masses if m > 0.0)


def semantic_entropy(clusters: ClusterSet, dist: Mapping[str, float]) -> float:
    return entropy(cluster_masses(clusters, dist))


def mutual_information_from(
    marginal: Sequence[float],
    conditional: Sequence[Sequence[float]],
    gamma1: float = DEFAULT_GAMMA,
    gamma2: float = DEFAULT_GAMMA,
) -> float:
    """Stabilised MI of the joint ``marginal[i] * conditional[i][t]``.

    Both arguments are normalised here, so unnormalised masses are accepted.
    Rows whose marginal mass is zero are ignored.
    """
    if gamma1 <= 0 or gamma2 <= 0:
        raise UsageError("stabilisation parameters must be positive")
    k = len(marginal)
    z = math.fsum(marginal)
    if z <= 0:
        raise UsageError("marginal has no mass")
    mu1 = [m / z for m in marginal]
    mu2 = []
    for i in range(k):
        row = conditional[i]
        zi = math.fsum(row)
        if mu1[i] > 0 and zi <= 0:
            raise UsageError(f"conditional row {i} has no mass")
        mu2.append([x / zi for x in row] if zi > 0 else [0.0] * len(row))
    # marginal of the second response under the pseudo-joint
    second = [math.fsum(mu1[j] * mu2[j][t] for j in range(k)) for t in range(k)]
    terms = []
    for i in range(k):
        for t in range(k):
            joint = mu1[i] * mu2[i][t]
            if joint == 0.0:
                continue
            pseudo = mu1[i] * second[t]
            terms.append(joint * math.log((joint + gamma1) / (pseudo + gamma2)))
    return math.fsum(terms)


def mutual_information(
    record: IterativeRecord,
    clusters: ClusterSet,
    mode: Mode = Mode.LENGTH_NORMALIZED,
    gamma1: float = DEFAULT_GAMMA,
    gamma2: float = DEFAULT_GAMMA,
) -> float:
    """MI between first-iteration and follow-up responses over clusters.

    ``clusters`` must partition the initial responses together with all
    follow-ups.  The conditional for a cluster is the probability-weighted
    average of the follow-up distributions of its initial members.
    """
    if gamma1 <= 0 or gamma2 <= 0:
        raise UsageError("stabilisation parameters must be positive")
    index = clusters.cluster_of()
    k = len(clusters.clusters)
    initial = response_distribution(record.initial, mode)

    marginal = [0.0] * k
    conditional = [[0.0] * k for _ in range(k)]
    for r in record.initial:
        follow = record.followups.get(r.id) or ()
        if not follow:
            raise UsageError(f"response {r.id!r} has no follow-up responses")
        if r.id not in index:
            raise UsageError(f"response {r.id!r} is not in any cluster")
        c = index[r.id]
        weight = initial[r.id]
        marginal[c] += weight
        for f in follow:
            if f.id not in index:
                raise UsageError(f"follow-up {f.id!r} is not in any cluster")
        for fid, p in response_distribution(follow, mode).items():
            conditional[c][index[fid]] += weight * p
    return mutual_information_from(marginal, conditional, gamma1, gamma2)


def llm_probability(top: ResponseProb, mode: Mode = Mode.LENGTH_NORMALIZED) -> float:
    if mode is Mode.RAW:
        return math.exp(top.total_logprob)
    return math.exp(length_normalize(top))
