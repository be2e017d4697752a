"""Constraint-guided enumeration over a bounded input domain.

Variables are assigned in canonical order by depth-first search.  Each
conjunct is checked as soon as its last variable is bound, which prunes
whole subtrees, and the first model found is the smallest one in the
canonical input ordering.
"""

from __future__ import annotations

import time
from typing import Dict, List, Optional, Sequence, Tuple

from ..nodes import Param
from .domain import InputDomain, Shape, layout
from .terms import TRUE, Term, compile_term


class TimeBudgetExceeded(Exception):
    pass


class Deadline:
    """Wall-clock budget shared by one equivalence check."""

    def __init__(self, seconds: Optional[float]):
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.at is not None and time.monotonic() >= self.at:
            raise TimeBudgetExceeded()


class Solver:
    def __init__(self, params: Sequence[Param], dom: InputDomain, deadline: Optional[Deadline] = None):
        self.params = tuple(params)
        self.dom = dom
        self.deadline = deadline or Deadline(None)
        self._layouts: Dict[Shape, Tuple[Dict[str, int], List[list]]] = {}

    def layout(self, shape: Shape):
        lay = self._layouts.get(shape)
        if lay is None:
            lay = self._layouts[shape] = layout(self.params, shape, self.dom)
        return lay

    def holds(self, term: Term, shape: Shape, assignment: Sequence) -> bool:
        if term.is_const:
            return bool(term.value)
        slots, _ = self.layout(shape)
        return bool(compile_term(term, slots)(assignment))

    def solve(self, conjuncts: Sequence[Term], shape: Shape) -> Optional[list]:
        """Smallest assignment satisfying every conjunct, or None."""
        self.deadline.check()
        slots, domains = self.layout(shape)
        n = len(domains)
        buckets: List[list] = [[] for _ in range(n)]
        for c in conjuncts:
            if c is TRUE:
                continue
            if c.is_const:
                return None
            depth = max(slots[name] for name in c.free_vars)
            buckets[depth].append(compile_term(c, slots))
        if n == 0:
            return []

        values: list = [None] * n
        pos = [0] * n
        d = 0
        ticks = 0
        while d >= 0:
            dom_d = domains[d]
            if pos[d] == len(dom_d):
                pos[d] = 0
                d -= 1
                continue
            values[d] = dom_d[pos[d]]
            pos[d] += 1
            ticks += 1
            if ticks & 0x3FF == 0:
                self.deadline.check()
            for check in buckets[d]:
                if not check(values):
                    break
            else:
                if d == n - 1:
                    return list(values)
                d += 1
        return None
