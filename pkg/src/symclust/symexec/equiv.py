"""Bounded equivalence checking.

``check_equivalence`` pairs the traces of two programs and searches each
pair for an input that satisfies both path constraints while the outcomes
differ.  ``brute_force_equivalence`` runs both programs through the
interpreter on every input in the domain; it shares no code with the
symbolic route apart from the domain ordering and serves as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from ..errors import UsageError
from ..interp import DEFAULT_STEP_BUDGET, Value, evaluate, format_value, outcomes_agree
from ..nodes import Program
from . import terms as T
from .domain import InputDomain, Shape, domain_size, enumerate_inputs, input_key, unflatten
from .engine import DEFAULT_TRACE_CAP, DEFAULT_UNROLL_CAP, Trace, TraceSet, sym_execute
from .solver import Deadline, Solver, TimeBudgetExceeded

DEFAULT_TIME_BUDGET = 10.0
DEFAULT_MAX_INPUTS = 2_000_000


@dataclass(frozen=True)
class Equivalent:
    def __str__(self) -> str:
        return "Equivalent"


@dataclass(frozen=True)
class NotEquivalent:
    counterexample: Tuple[Value, ...]

    def __str__(self) -> str:
        return f"NotEquivalent cx=[{', '.join(format_value(v) for v in self.counterexample)}]"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def __str__(self) -> str:
        return f"Inconclusive({self.reason})"


EquivVerdict = Union[Equivalent, NotEquivalent, Inconclusive]


@dataclass(frozen=True)
class Caps:
    unroll_cap: int = DEFAULT_UNROLL_CAP
    trace_cap: int = DEFAULT_TRACE_CAP


def _check_signatures(p: Program, q: Program) -> None:
    if p.signature != q.signature:
        raise UsageError(
            f"signature mismatch: {p.name}{_sig(p)} vs {q.name}{_sig(q)}"
        )


def _sig(p: Program) -> str:
    params, ret = p.signature
    return f"({', '.join(str(t) for t in params)}) -> {ret}"


def _outcome_differs(a: Trace, b: Trace) -> T.Term:
    """Condition under which the outcomes of two finished traces differ."""
    if a.kind == "error" and b.kind == "error":
        return T.FALSE
    if a.kind != b.kind:
        return T.TRUE
    x, y = a.value, b.value
    if isinstance(x, tuple):
        if len(x) != len(y):
            return T.TRUE
        return T.disj([T.binop("ne", u, v) for u, v in zip(x, y)])
    return T.binop("ne", x, y)


def _contradicts(a: Trace, b_negations: frozenset) -> bool:
    return any(c in b_negations for c in a.constraint)


def check_equivalence(
    p: Program,
    q: Program,
    dom: InputDomain = InputDomain(),
    caps: Caps = Caps(),
    time_budget: Optional[float] = DEFAULT_TIME_BUDGET,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> EquivVerdict:
    """Symbolic bounded equivalence check.

    A counterexample is the smallest distinguishing input in canonical
    order and is always replayed through the interpreter before it is
    reported.
    """
    _check_signatures(p, q)
    if p == q:
        return Equivalent()
    deadline = Deadline(time_budget)
    try:
        tp = sym_execute(p, dom, caps.unroll_cap, caps.trace_cap, deadline)
        tq = sym_execute(q, dom, caps.unroll_cap, caps.trace_cap, deadline)
        best = _search(tp, tq, dom, deadline)
    except TimeBudgetExceeded:
        return Inconclusive("time budget")

    if best is not None:
        cx = tuple(best)
        a = evaluate(p, cx, step_budget)
        b = evaluate(q, cx, step_budget)
        if outcomes_agree(a, b):
            raise RuntimeError(f"symbolic counterexample {cx} not confirmed by the interpreter ({a} vs {b})")
        return NotEquivalent(cx)
    if tp.truncated or tq.truncated:
        return Inconclusive("trace cap")
    if tp.has_unknown or tq.has_unknown:
        return Inconclusive("unroll cap")
    return Equivalent()


def _search(tp: TraceSet, tq: TraceSet, dom: InputDomain, deadline: Deadline) -> Optional[List[Value]]:
    solver = Solver(tp.params, dom, deadline)
    by_shape: Dict[Shape, List[Trace]] = {}
    for t in tq.traces:
        if t.kind != "unknown":
            by_shape.setdefault(t.shape, []).append(t)
    negations = {id(t): frozenset(T.not_(c) for c in t.constraint) for ts in by_shape.values() for t in ts}

    best, best_key = None, None
    for a in tp.traces:
        if a.kind == "unknown":
            continue
        for b in by_shape.get(a.shape, ()):
            diff = _outcome_differs(a, b)
            if diff is T.FALSE or _contradicts(a, negations[id(b)]):
                continue
            model = solver.solve(a.constraint + b.constraint + (diff,), a.shape)
            if model is None:
                continue
            cx = unflatten(model, tp.params, a.shape)
            key = input_key(cx)
            if best_key is None or key < best_key:
                best, best_key = cx, key
    return best


def brute_force_equivalence(
    p: Program,
    q: Program,
    dom: InputDomain = InputDomain(),
    step_budget: int = DEFAULT_STEP_BUDGET,
    max_inputs: int = DEFAULT_MAX_INPUTS,
) -> EquivVerdict:
    """Compare interpreter outcomes on every input of ``dom``."""
    _check_signatures(p, q)
    size = domain_size(p.params, dom)
    if size > max_inputs:
        raise UsageError(f"input domain has {size} inputs, above the ceiling of {max_inputs}")
    for inputs in enumerate_inputs(p.params, dom):
        if not outcomes_agree(evaluate(p, inputs, step_budget), evaluate(q, inputs, step_budget)):
            return NotEquivalent(tuple(inputs))
    return Equivalent()
