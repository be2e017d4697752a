"""Partition candidate programs into semantic equivalence clusters.

Invalid snippets are isolated first.  Valid pairs are then compared in
canonical order (by input position) and joined in a union-find whenever the
bounded check says Equivalent, or Inconclusive under the merge policy.
Connected components are the clusters, which enforces transitivity.  A
pair whose endpoints are already connected is not checked again; this does
not change the partition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import UsageError
from .interp import DEFAULT_STEP_BUDGET
from .lang import Invalid, SourceSnippet, parse
from .nodes import Program
from .symexec import (
    DEFAULT_TIME_BUDGET,
    Caps,
    EquivVerdict,
    Equivalent,
    Inconclusive,
    InputDomain,
    NotEquivalent,
    check_equivalence,
)


class InconclusivePolicy(enum.Enum):
    MERGE = "merge"
    SEPARATE = "separate"


@dataclass(frozen=True)
class CheckConfig:
    """Everything that bounds a pairwise equivalence check."""

    dom: InputDomain = InputDomain()
    caps: Caps = Caps()
    time_budget: Optional[float] = DEFAULT_TIME_BUDGET
    step_budget: int = DEFAULT_STEP_BUDGET


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def connected(self, a, b) -> bool:
        return self.find(a) == self.find(b)


@dataclass
class ClusterSet:
    clusters: List[List[str]]
    pair_log: Dict[Tuple[str, str], EquivVerdict] = field(default_factory=dict)
    invalid: Dict[str, str] = field(default_factory=dict)
    conflicts: List[Tuple[str, str]] = field(default_factory=list)

    def cluster_of(self) -> Dict[str, int]:
        return {sid: k for k, members in enumerate(self.clusters) for sid in members}

    def as_partition(self) -> frozenset:
        return frozenset(frozenset(c) for c in self.clusters)

    def to_record(self, problem_id: str) -> dict:
        verdicts = []
        for (a, b), verdict in self.pair_log.items():
            entry = {"a": a, "b": b, "verdict": type(verdict).__name__}
            if isinstance(verdict, NotEquivalent):
                entry["counterexample"] = [_jsonable(v) for v in verdict.counterexample]
            if isinstance(verdict, Inconclusive):
                entry["reason"] = verdict.reason
            if (a, b) in self.conflicts:
                entry["conflict"] = True
            verdicts.append(entry)
        return {"problem_id": problem_id, "clusters": [list(c) for c in self.clusters], "verdicts": verdicts}


def _jsonable(v):
    return list(v) if isinstance(v, tuple) else v


def cluster_count(c: ClusterSet) -> int:
    return len(c.clusters)


def cluster_programs(
    items: Sequence[Tuple[str, Optional[Program]]],
    config: CheckConfig = CheckConfig(),
    policy: InconclusivePolicy = InconclusivePolicy.MERGE,
    invalid_reasons: Optional[Dict[str, str]] = None,
) -> ClusterSet:
    """Cluster already parsed programs; ``None`` marks an invalid snippet."""
    ids = [sid for sid, _ in items]
    if not ids:
        raise UsageError("cannot cluster an empty snippet list")
    if len(set(ids)) != len(ids):
        dup = sorted({x for x in ids if ids.count(x) > 1})
        raise UsageError(f"duplicate snippet ids: {', '.join(dup)}")

    valid = [(sid, p) for sid, p in items if p is not None]
    signatures = {p.signature for _, p in valid}
    if len(signatures) > 1:
        raise UsageError("valid snippets have differing signatures; cluster one problem at a time")

    uf = UnionFind(ids)
    pair_log: Dict[Tuple[str, str], EquivVerdict] = {}
    for i, (a, p) in enumerate(valid):
        for b, q in valid[i + 1:]:
            if uf.connected(a, b):
                continue
            verdict = check_equivalence(p, q, config.dom, config.caps, config.time_budget, config.step_budget)
            pair_log[(a, b)] = verdict
            if isinstance(verdict, Equivalent) or (
                isinstance(verdict, Inconclusive) and policy is InconclusivePolicy.MERGE
            ):
                uf.union(a, b)

    groups: Dict[str, List[str]] = {}
    for sid in ids:
        groups.setdefault(uf.find(sid), []).append(sid)
    clusters = sorted(groups.values(), key=lambda members: ids.index(members[0]))
    conflicts = [
        pair for pair, v in pair_log.items()
        if isinstance(v, NotEquivalent) and uf.connected(*pair)
    ]
    invalid = dict(invalid_reasons or {})
    for sid, p in items:
        if p is None:
            invalid.setdefault(sid, "invalid")
    return ClusterSet(clusters, pair_log, invalid, conflicts)


def cluster(
    snippets: Sequence[SourceSnippet],
    config: CheckConfig = CheckConfig(),
    policy: InconclusivePolicy = InconclusivePolicy.MERGE,
) -> ClusterSet:
    """Parse each snippet and cluster them; invalid ones become singletons."""
    items: List[Tuple[str, Optional[Program]]] = []
    reasons: Dict[str, str] = {}
    for s in snippets:
        verdict = parse(s)
        if isinstance(verdict, Invalid):
            reasons[s.id] = verdict.reason
            items.append((s.id, None))
        else:
            items.append((s.id, verdict.program))
    return cluster_programs(items, config, policy, reasons)

