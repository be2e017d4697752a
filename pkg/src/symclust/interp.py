"""Concrete big-step evaluator with a deterministic step budget.

Every AST node evaluation (statement or expression) costs one step, and so
does each loop iteration.  Values are plain Python objects: ``int``,
``bool`` and ``tuple`` of ints for arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple, Union

from .nodes import (
    Assign,
    Binary,
    BoolLit,
    For,
    If,
    Index,
    IndexAssign,
    IntLit,
    Len,
    Let,
    Name,
    Program,
    Return,
    SnipType,
    Sorted,
    Unary,
    While,
)

DEFAULT_STEP_BUDGET = 1_000_000

Value = Union[int, bool, Tuple[int, ...]]


class ErrorKind(enum.Enum):
    INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
    DIVISION_BY_ZERO = "DivisionByZero"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Returned:
    value: Value

    def __str__(self) -> str:
        return format_value(self.value)


@dataclass(frozen=True)
class Errored:
    kind: ErrorKind

    def __str__(self) -> str:
        return f"error: {self.kind}"


@dataclass(frozen=True)
class BudgetExceeded:
    def __str__(self) -> str:
        return "BudgetExceeded"


Outcome = Union[Returned, Errored, BudgetExceeded]


@dataclass(frozen=True)
class TestCase:
    inputs: Tuple[Value, ...]
    expected: Value

    __test__ = False  # not a pytest class


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def trunc_mod(a: int, b: int) -> int:
    return a - b * trunc_div(a, b)


def value_matches(v: Value, t: SnipType) -> bool:
    if t is SnipType.BOOL:
        return isinstance(v, bool)
    if t is SnipType.INT:
        return isinstance(v, int) and not isinstance(v, bool)
    return isinstance(v, tuple) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)


def outcomes_agree(a: Outcome, b: Outcome) -> bool:
    """Outcome equality used by the equivalence checks.

    Returns compare by value, any error matches any error, and two budget
    exhaustions are not told apart.
    """
    if isinstance(a, Returned) and isinstance(b, Returned):
        return a.value == b.value and type(a.value) is type(b.value)
    if isinstance(a, Errored) and isinstance(b, Errored):
        return True
    return isinstance(a, BudgetExceeded) and isinstance(b, BudgetExceeded)


class _Budget(Exception):
    pass


class _Fault(Exception):
    def __init__(self, kind: ErrorKind):
        self.kind = kind


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Machine:
    def __init__(self, budget: int):
        self.remaining = budget

    def tick(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise _Budget()

    def expr(self, e, env: Dict[str, Value]) -> Value:
        self.tick()
        t = type(e)
        if t is IntLit or t is BoolLit:
            return e.value
        if t is Name:
            return env[e.ident]
        if t is Binary:
            op = e.op
            if op == "&&":
                return self.expr(e.left, env) and self.expr(e.right, env)
            if op == "||":
                return self.expr(e.left, env) or self.expr(e.right, env)
            a = self.expr(e.left, env)
            b = self.expr(e.right, env)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/" or op == "%":
                if b == 0:
                    raise _Fault(ErrorKind.DIVISION_BY_ZERO)
                return trunc_div(a, b) if op == "/" else trunc_mod(a, b)
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            if op == ">=":
                return a >= b
            if op == "==":
                return a == b
            if op == "!=":
                return a != b
            raise ValueError(f"unknown operator {op}")
        if t is Index:
            arr = env[e.array]
            i = self.expr(e.index, env)
            if i < 0 or i >= len(arr):
                raise _Fault(ErrorKind.INDEX_OUT_OF_BOUNDS)
            return arr[i]
        if t is Unary:
            v = self.expr(e.operand, env)
            return -v if e.op == "-" else not v
        if t is Len:
            return len(self.expr(e.arg, env))
        if t is Sorted:
            return tuple(sorted(self.expr(e.arg, env)))
        raise TypeError(f"not an expression: {e!r}")

    def block(self, stmts, env: Dict[str, Value]) -> None:
        declared = []
        try:
            for s in stmts:
                self.stmt(s, env, declared)
        finally:
            for name in declared:
                env.pop(name, None)

    def stmt(self, s, env: Dict[str, Value], declared: list) -> None:
        self.tick()
        t = type(s)
        if t is Let:
            env[s.name] = self.expr(s.value, env)
            declared.append(s.name)
        elif t is Assign:
            env[s.name] = self.expr(s.value, env)
        elif t is IndexAssign:
            arr = env[s.array]
            i = self.expr(s.index, env)
            v = self.expr(s.value, env)
            if i < 0 or i >= len(arr):
                raise _Fault(ErrorKind.INDEX_OUT_OF_BOUNDS)
            env[s.array] = arr[:i] + (v,) + arr[i + 1:]
        elif t is If:
            if self.expr(s.cond, env):
                self.block(s.then, env)
            elif s.orelse is not None:
                self.block(s.orelse, env)
        elif t is While:
            while self.expr(s.cond, env):
                self.block(s.body, env)
        elif t is For:
            lo = self.expr(s.lo, env)
            hi = self.expr(s.hi, env)
            try:
                for i in range(lo, hi):
                    self.tick()
                    env[s.var] = i
                    self.block(s.body, env)
            finally:
                env.pop(s.var, None)
        elif t is Return:
            raise _Return(self.expr(s.value, env))
        else:
            raise TypeError(f"not a statement: {s!r}")


def evaluate(program: Program, inputs: Sequence[Value], step_budget: int = DEFAULT_STEP_BUDGET) -> Outcome:
    if step_budget <= 0:
        raise ValueError("step_budget must be positive")
    if len(inputs) != len(program.params):
        raise ValueError(f"{program.name} takes {len(program.params)} inputs, got {len(inputs)}")
    env: Dict[str, Value] = {}
    for param, value in zip(program.params, inputs):
        if isinstance(value, list):
            value = tuple(value)
        if not value_matches(value, param.type):
            raise ValueError(f"input for '{param.name}' must be {param.type}, got {value!r}")
        env[param.name] = value
    machine = _Machine(step_budget)
    try:
        machine.block(program.body, env)
    except _Return as r:
        return Returned(r.value)
    except _Fault as f:
        return Errored(f.kind)
    except _Budget:
        return BudgetExceeded()
    raise AssertionError("validated program fell through")  # pragma: no cover


def correctness_score(program: Program, tests: Sequence[TestCase], step_budget: int = DEFAULT_STEP_BUDGET) -> float:
    """Fraction of tests on which the program returns the expected value."""
    if not tests:
        raise ValueError("correctness_score needs at least one test case")
    passed = 0
    for case in tests:
        outcome = evaluate(program, case.inputs, step_budget)
        if isinstance(outcome, Returned) and outcomes_agree(outcome, Returned(case.expected)):
            passed += 1
    return passed / len(tests)
