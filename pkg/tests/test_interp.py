import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import CORPUS, GOOD_ARRAY, corpus_source
from strategies import program_sources
from symclust.interp import (
    BudgetExceeded,
    Errored,
    ErrorKind,
    Returned,
    TestCase,
    correctness_score,
    evaluate,
    outcomes_agree,
    trunc_div,
    trunc_mod,
)
from symclust.lang import parse_program

_PROPS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def run(src, *inputs, budget=1_000_000):
    return evaluate(parse_program(src), list(inputs), budget)


def test_doubling():
    assert run("fn f(x: int) -> int { return x + x; }", 3) == Returned(6)


def test_index_out_of_bounds():
    assert run("fn f(a: [int]) -> int { return a[5]; }", [1, 2]) == Errored(ErrorKind.INDEX_OUT_OF_BOUNDS)
    assert run("fn f(a: [int]) -> int { return a[-1]; }", [1, 2]) == Errored(ErrorKind.INDEX_OUT_OF_BOUNDS)


def test_divergence_hits_budget():
    src = "fn f(x: int) -> int { while true { } return 0; }"
    assert run(src, 0) == BudgetExceeded()


@pytest.mark.parametrize("op", ["/", "%"])
def test_division_by_zero(op):
    assert run(f"fn f(x: int) -> int {{ return 1 {op} x; }}", 0) == Errored(ErrorKind.DIVISION_BY_ZERO)


@pytest.mark.parametrize(
    "a, b, q, r",
    [(7, 2, 3, 1), (-7, 2, -3, -1), (7, -2, -3, 1), (-7, -2, 3, -1), (0, 5, 0, 0), (6, 3, 2, 0)],
)
def test_truncating_division(a, b, q, r):
    assert trunc_div(a, b) == q and trunc_mod(a, b) == r
    assert q * b + r == a
    assert run("fn f(x: int, y: int) -> int { return x / y; }", a, b) == Returned(q)
    assert run("fn f(x: int, y: int) -> int { return x % y; }", a, b) == Returned(r)


def test_short_circuit_guards_errors():
    src = "fn f(a: [int]) -> bool { return len(a) > 0 && a[0] > 0; }"
    assert run(src, []) == Returned(False)
    src = "fn f(a: [int]) -> bool { return len(a) == 0 || a[0] > 0; }"
    assert run(src, []) == Returned(True)


def test_for_bounds_evaluated_once_and_half_open():
    src = "fn f(x: int) -> int { let n = 2; let s = 0; for i in 0..n { n = n + 1; s = s + 1; } return s; }"
    assert run(src, 0) == Returned(2)
    assert run("fn f(x: int) -> int { let s = 0; for i in 3..1 { s = s + 1; } return s; }", 0) == Returned(0)


def test_arrays_have_value_semantics():
    src = "fn f(a: [int]) -> int { let b = a; b[0] = 9; return a[0] * 10 + b[0]; }"
    assert run(src, [1, 2]) == Returned(19)


def test_sorted_returns_new_array():
    src = "fn f(a: [int]) -> [int] { let s = sorted(a); a[0] = 7; return s; }"
    assert run(src, [3, -1, 2]) == Returned((-1, 2, 3))


def test_step_budget_counts_nodes():
    src = "fn f(x: int) -> int { return x; }"
    assert run(src, 1, budget=1) == BudgetExceeded()
    assert run(src, 1, budget=2) == Returned(1)


def test_input_validation():
    p = parse_program("fn f(x: int) -> int { return x; }")
    with pytest.raises(ValueError):
        evaluate(p, [])
    with pytest.raises(ValueError):
        evaluate(p, [True])
    with pytest.raises(ValueError):
        evaluate(p, [1], 0)


def test_outcome_equality_rules():
    assert outcomes_agree(Returned(1), Returned(1))
    assert not outcomes_agree(Returned(1), Returned(2))
    assert not outcomes_agree(Returned(1), Returned(True))
    assert outcomes_agree(Errored(ErrorKind.INDEX_OUT_OF_BOUNDS), Errored(ErrorKind.DIVISION_BY_ZERO))
    assert outcomes_agree(BudgetExceeded(), BudgetExceeded())
    assert not outcomes_agree(BudgetExceeded(), Returned(0))
    assert not outcomes_agree(Errored(ErrorKind.DIVISION_BY_ZERO), BudgetExceeded())


def test_outcome_strings():
    assert str(Returned(6)) == "6"
    assert str(Returned((1, 2))) == "[1, 2]"
    assert str(Returned(True)) == "true"
    assert str(Errored(ErrorKind.INDEX_OUT_OF_BOUNDS)) == "error: IndexOutOfBounds"
    assert str(BudgetExceeded()) == "BudgetExceeded"


def test_correctness_nine_of_ten():
    p = parse_program("fn f(x: int) -> int { if x == 9 { return 0; } return x; }")
    tests = [TestCase((k,), k) for k in range(10)]
    assert correctness_score(p, tests) == 0.9


def test_correctness_all_errors():
    p = parse_program("fn f(x: int) -> int { return 1 / 0; }")
    assert correctness_score(p, [TestCase((k,), 1) for k in range(4)]) == 0.0


def test_correctness_budget_counts_as_failure():
    p = parse_program("fn f(x: int) -> int { while true { } return 0; }")
    assert correctness_score(p, [TestCase((0,), 0)], step_budget=100) == 0.0


def test_correctness_needs_tests():
    p = parse_program("fn f(x: int) -> int { return x; }")
    with pytest.raises(ValueError):
        correctness_score(p, [])


@pytest.mark.parametrize("name", GOOD_ARRAY)
def test_good_array_solutions_pass_hand_checked_suite(name):
    suite = json.loads((CORPUS / "good_array_tests.json").read_text())["tests"]
    assert len(suite) == 12
    tests = [TestCase(tuple(tuple(v) for v in t["input"]), t["expected"]) for t in suite]
    assert correctness_score(parse_program(corpus_source(name)), tests) == 1.0


def _inputs(params):
    gen = {"int": st.integers(-6, 6), "bool": st.booleans(), "[int]": st.lists(st.integers(-3, 3), max_size=4)}
    return st.tuples(*[gen[p.type.value] for p in params])


@_PROPS
@given(program_sources(depth=3), st.data())
def test_determinism(src, data):
    p = parse_program(src)
    inputs = data.draw(_inputs(p.params))
    assert evaluate(p, inputs) == evaluate(p, inputs)


@_PROPS
@given(program_sources(depth=3), st.data())
def test_budget_monotonicity(src, data):
    p = parse_program(src)
    inputs = data.draw(_inputs(p.params))
    full = evaluate(p, inputs)
    budget = data.draw(st.integers(1, 400))
    partial = evaluate(p, inputs, budget)
    if isinstance(partial, BudgetExceeded):
        return
    assert partial == full
    assert evaluate(p, inputs, budget + data.draw(st.integers(0, 1000))) == partial
