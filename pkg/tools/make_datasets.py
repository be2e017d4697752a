"""Regenerate the bundled datasets under src/symclust/data/datasets.

Usage: python3 tools/make_datasets.py

Every response is a hand-written SnipLang program taken from a family of
correct (mutually equivalent) solutions or from buggy variants.  Expected
test outputs come from running the family's reference solution through the
interpreter.  Output is deterministic.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from symclust.interp import Returned, evaluate
from symclust.lang import parse_program

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "src/symclust/data/corpus"
OUT = ROOT / "src/symclust/data/datasets"


def snip(name: str) -> str:
    return (CORPUS / f"{name}.snip").read_text()


def fn(sig: str, body: str) -> str:
    return f"fn {sig} {{\n{body}\n}}\n"


FAMILIES = {
    "abs": {
        "entry": ("abs", [("x", "int")], "int"),
        "correct": [snip("abs_branch"), snip("abs_else"), snip("abs_square")],
        "buggy": [
            snip("abs_bad"),
            fn("abs(x: int) -> int", "    return -x;"),
            fn("abs(x: int) -> int", "    if x < 0 {\n        return -x - 1;\n    }\n    return x;"),
        ],
    },
    "sign": {
        "entry": ("sign", [("x", "int")], "int"),
        "correct": [snip("sign_nested"), snip("sign_flat")],
        "buggy": [
            snip("sign_bad"),
            fn("sign(x: int) -> int", "    if x <= 0 {\n        return -1;\n    }\n    return 1;"),
            fn("sign(x: int) -> int", "    if x > 0 {\n        return -1;\n    }\n    if x < 0 {\n        return 1;\n    }\n    return 0;"),
        ],
    },
    "triangle": {
        "entry": ("tri", [("n", "int")], "int"),
        "correct": [snip("triangle_loop"), snip("triangle_formula"), snip("triangle_while")],
        "buggy": [
            snip("triangle_unguarded"),
            fn("tri(n: int) -> int", "    let s = 0;\n    for i in 0..n {\n        s = s + i;\n    }\n    return s;"),
            fn("tri(n: int) -> int", "    if n < 0 {\n        return 0;\n    }\n    return n * n / 2;"),
        ],
    },
    "odd": {
        "entry": ("odd", [("x", "int")], "bool"),
        "correct": [snip("is_odd_mod"), snip("is_odd_div")],
        "buggy": [
            snip("is_odd_eq1"),
            fn("odd(x: int) -> bool", "    return x % 2 == 0;"),
            fn("odd(x: int) -> bool", "    return x % 3 != 0;"),
        ],
    },
    "max2": {
        "entry": ("max2", [("a", "int"), ("b", "int")], "int"),
        "correct": [snip("max2_if"), snip("max2_else")],
        "buggy": [
            snip("max2_bad"),
            fn("max2(a: int, b: int) -> int", "    return a;"),
            fn("max2(a: int, b: int) -> int", "    if a > b {\n        return a;\n    }\n    return a + b;"),
        ],
    },
    "min3": {
        "entry": ("min3", [("a", "int"), ("b", "int"), ("c", "int")], "int"),
        "correct": [snip("min3_chain"), snip("min3_nested")],
        "buggy": [
            snip("min3_bad"),
            fn("min3(a: int, b: int, c: int) -> int", "    if a < b {\n        return a;\n    }\n    return b;"),
            fn("min3(a: int, b: int, c: int) -> int", "    if c < a {\n        return c;\n    }\n    return a;"),
        ],
    },
    "xor": {
        "entry": ("xor", [("p", "bool"), ("q", "bool")], "bool"),
        "correct": [snip("xor_ne"), snip("xor_expand")],
        "buggy": [
            snip("xor_bad"),
            fn("xor(p: bool, q: bool) -> bool", "    return p && q;"),
            fn("xor(p: bool, q: bool) -> bool", "    return p == q;"),
        ],
    },
    "sum": {
        "entry": ("total", [("a", "[int]")], "int"),
        "correct": [snip("sum_for"), snip("sum_while_back")],
        "buggy": [
            snip("sum_skip_first"),
            fn("total(a: [int]) -> int", "    let s = 0;\n    for i in 0..len(a) - 1 {\n        s = s + a[i];\n    }\n    return s;"),
            fn("total(a: [int]) -> int", "    let s = 0;\n    for i in 0..len(a) {\n        s = s + a[i] * a[i];\n    }\n    return s;"),
        ],
    },
    "biggest": {
        "entry": ("biggest", [("a", "[int]")], "int"),
        "correct": [snip("max_elem"), snip("max_sorted")],
        "buggy": [
            snip("max_zero_init"),
            fn("biggest(a: [int]) -> int", "    if len(a) == 0 {\n        return 0;\n    }\n    return a[0];"),
            fn("biggest(a: [int]) -> int", "    if len(a) == 0 {\n        return 0;\n    }\n    let s = sorted(a);\n    return s[0];"),
        ],
    },
    "count_pos": {
        "entry": ("count_pos", [("a", "[int]")], "int"),
        "correct": [snip("count_pos"), snip("count_pos_complement")],
        "buggy": [
            snip("count_nonneg"),
            fn("count_pos(a: [int]) -> int", "    return len(a);"),
            fn("count_pos(a: [int]) -> int", "    let c = 0;\n    for i in 0..len(a) {\n        if a[i] < 0 {\n            c = c + 1;\n        }\n    }\n    return c;"),
        ],
    },
    "is_sorted": {
        "entry": ("is_sorted", [("a", "[int]")], "bool"),
        "correct": [snip("is_sorted_loop"), snip("is_sorted_cmp")],
        "buggy": [
            snip("is_sorted_strict"),
            fn("is_sorted(a: [int]) -> bool", "    return len(a) < 2 || a[0] <= a[1];"),
            fn("is_sorted(a: [int]) -> bool", "    for i in 1..len(a) {\n        if a[i - 1] < a[i] {\n            return false;\n        }\n    }\n    return true;"),
        ],
    },
    "good_array": {
        "entry": ("is_good", [("nums", "[int]")], "bool"),
        "correct": [snip("good_array_sorted"), snip("good_array_count"), snip("good_array_max")],
        "buggy": [
            snip("good_array_off_by_one"),
            snip("good_array_weak_guard"),
            snip("good_array_count_once"),
            snip("good_array_max_unsorted"),
        ],
        "extra_tests": [[[1, 1]], [[2, 1, 2]], [[1, 3, 3, 2]], [[1, 2]], [[0]], [[3, 1, 2, 3]]],
    },
}


def random_value(rng: random.Random, t: str):
    if t == "int":
        return rng.randint(-8, 8)
    if t == "bool":
        return rng.random() < 0.5
    return [rng.randint(-4, 4) for _ in range(rng.randint(0, 4))]


EDGE = {"int": [0, -1, 1, -7], "bool": [True, False, True, False], "[int]": [[], [0], [-3, -1], [2, 2, 1]]}


def make_tests(rng: random.Random, family: dict, count: int = 10) -> list:
    params = family["entry"][1]
    inputs = [list(x) for x in family.get("extra_tests", [])]
    if not inputs:
        inputs = [[EDGE[t][(i + k) % 4] for k, (_, t) in enumerate(params)] for i in range(4)]
    while len(inputs) < count:
        inputs.append([random_value(rng, t) for _, t in params])
    reference = parse_program(family["correct"][0])
    tests = []
    for case in inputs:
        outcome = evaluate(reference, case)
        assert isinstance(outcome, Returned), (family["entry"][0], case, outcome)
        value = list(outcome.value) if isinstance(outcome.value, tuple) else outcome.value
        tests.append({"input": case, "expected": value})
    return tests


def response(rid: str, source: str, rng: random.Random) -> dict:
    tokens = rng.randint(20, 80)
    return {"id": rid, "source": source, "logprob": round(-tokens * rng.uniform(0.05, 0.6), 4), "tokens": tokens}


def make_problem(pid: str, family: dict, n_correct: int, n_responses: int, rng: random.Random,
                 followups: int = 2, invalid: int = 0) -> dict:
    pool = [rng.choice(family["correct"]) for _ in range(n_correct)]
    pool += [rng.choice(family["buggy"]) for _ in range(n_responses - n_correct - invalid)]
    pool += ["fn broken(x: int) -> int {\n    return x +;\n}\n"] * invalid
    rng.shuffle(pool)
    responses = []
    for i, src in enumerate(pool):
        r = response(f"r{i}", src, rng)
        if followups:
            r["followups"] = [
                response(f"r{i}f{j}", src if rng.random() < 0.6 else rng.choice(pool), rng)
                for j in range(followups)
            ]
        responses.append(r)
    # the ranking favours the response with the best length-normalised score
    top = max(responses, key=lambda r: r["logprob"] / r["tokens"])
    name, params, ret = family["entry"]
    return {
        "id": pid,
        "entry": {"name": name, "params": [{"name": n, "type": t} for n, t in params], "return": ret},
        "responses": responses,
        "tests": make_tests(rng, family),
        "top_ranked": top["id"],
    }


def synthetic(seed: int = 7) -> dict:
    """Each family yields one easy problem (4-5 of 5 samples correct) and one
    hard problem (0-1 correct).  The ranking ignores correctness."""
    rng = random.Random(seed)
    problems = []
    for k, (name, family) in enumerate(FAMILIES.items()):
        for difficulty, n_correct in (("easy", 5 - k % 2), ("hard", k % 2)):
            p = make_problem(f"{name}-{difficulty}", family, n_correct, 5, rng)
            problems.append(dict(p, difficulty=difficulty))
    return {"problems": problems}


def fixture() -> dict:
    rng = random.Random(11)
    ga = FAMILIES["good_array"]
    good = make_problem("good-array", ga, 3, 3, rng)
    # the three correct translations, one each, with fixed scores
    for r, src, lp in zip(good["responses"], ga["correct"], (-12.0, -14.5, -16.0)):
        r["source"], r["logprob"], r["tokens"] = src, lp, 40
        for f in r["followups"]:
            f["source"] = src
    good["top_ranked"] = "r0"
    plan = [
        ("abs-invalid", "abs", 2, 4, 1, "easy"),
        ("xor-mixed", "xor", 2, 4, 0, "easy"),
        ("max2-buggy", "max2", 0, 4, 0, "medium"),
        ("sum-mixed", "sum", 3, 4, 0, "hard"),
        ("sign-buggy", "sign", 1, 4, 0, "medium"),
    ]
    problems = [dict(good, difficulty="hard")]
    for pid, fam, n_correct, n, invalid, difficulty in plan:
        p = make_problem(pid, FAMILIES[fam], n_correct, n, rng, invalid=invalid)
        problems.append(dict(p, difficulty=difficulty))
    return {"problems": problems}


def strip_followups(doc: dict) -> dict:
    out = json.loads(json.dumps(doc))
    for p in out["problems"]:
        for r in p["responses"]:
            r.pop("followups", None)
    return out


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    fx = fixture()
    docs = {
        "synthetic.json": synthetic(),
        "fixture.json": fx,
        "fixture_no_followups.json": strip_followups(fx),
    }
    for name, doc in docs.items():
        (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
