"""Bounded symbolic execution and equivalence checking for SnipLang."""

from .domain import InputDomain, enumerate_inputs, input_key
from .engine import DEFAULT_TRACE_CAP, DEFAULT_UNROLL_CAP, Trace, TraceSet, sym_execute
from .equiv import (
    DEFAULT_TIME_BUDGET,
    Caps,
    EquivVerdict,
    Equivalent,
    Inconclusive,
    NotEquivalent,
    brute_force_equivalence,
    check_equivalence,
)
from .solver import Deadline, TimeBudgetExceeded

__all__ = [
    "Caps",
    "DEFAULT_TIME_BUDGET",
    "DEFAULT_TRACE_CAP",
    "DEFAULT_UNROLL_CAP",
    "Deadline",
    "EquivVerdict",
    "Equivalent",
    "Inconclusive",
    "InputDomain",
    "NotEquivalent",
    "TimeBudgetExceeded",
    "Trace",
    "TraceSet",
    "brute_force_equivalence",
    "check_equivalence",
    "enumerate_inputs",
    "input_key",
    "sym_execute",
]
