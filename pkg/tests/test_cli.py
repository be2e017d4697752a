import json
import re
import shutil

import pytest

from conftest import CORPUS, DATASETS, EXAMPLES, GOOD_ARRAY
from symclust.cli import build_parser, main


def ex(name):
    return str(EXAMPLES / f"{name}.snip")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- run ------------------------------------------------------------------------


def test_run_doubling(capsys):
    assert run_cli(capsys, "run", ex("doubling"), "--input", "[3]")[:2] == (0, "6\n")


def test_run_reports_runtime_error(capsys):
    code, out, _ = run_cli(capsys, "run", ex("oob"), "--input", "[[1,2]]")
    assert (code, out) == (0, "error: IndexOutOfBounds\n")


def test_run_syntax_error(capsys):
    code, _, err = run_cli(capsys, "run", ex("bad_syntax"))
    assert code == 1 and "error" in err


@pytest.mark.parametrize("value", ["[1, 2]", "[true]", "{}", "not json"])
def test_run_bad_input(capsys, value):
    assert run_cli(capsys, "run", ex("doubling"), "--input", value)[0] == 1


def test_run_budget(capsys):
    assert run_cli(capsys, "run", ex("doubling"), "--input", "[3]", "--budget", "1")[1] == "BudgetExceeded\n"


def test_run_missing_file(capsys, tmp_path):
    assert run_cli(capsys, "run", str(tmp_path / "nope.snip"))[0] == 1


# -- equiv ----------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["symbolic", "brute"])
def test_equiv_examples(capsys, mode):
    assert run_cli(capsys, "equiv", ex("double"), ex("twice"), "--mode", mode)[:2] == (0, "Equivalent\n")
    code, out, _ = run_cli(capsys, "equiv", ex("div2mul2"), ex("id"), "--mode", mode)
    assert (code, out) == (0, "NotEquivalent cx=[1]\n")


def test_equiv_signature_mismatch(capsys, tmp_path):
    other = tmp_path / "b.snip"
    other.write_text("fn g(x: bool) -> int { return 0; }")
    code, _, err = run_cli(capsys, "equiv", ex("double"), str(other))
    assert code == 1 and "signature" in err


def test_equiv_time_budget(capsys):
    a, b = (str(CORPUS / f"{n}.snip") for n in GOOD_ARRAY[:2])
    assert run_cli(capsys, "equiv", a, b)[1] == "Equivalent\n"
    # the full check takes well over a millisecond
    code, out, _ = run_cli(capsys, "equiv", a, b, "--pair-timeout-ms", "1")
    assert (code, out) == (0, "Inconclusive(time budget)\n")


def test_equiv_unroll_cap(capsys):
    a, b = (str(CORPUS / f"{n}.snip") for n in ("square_sum_loop", "square_mul"))
    assert run_cli(capsys, "equiv", a, b)[1] == "Inconclusive(unroll cap)\n"
    assert run_cli(capsys, "equiv", a, b, "--unroll-cap", "64")[1] == "Equivalent\n"


@pytest.mark.parametrize("flag", ["--unroll-cap", "--trace-cap", "--pair-timeout-ms", "--step-budget"])
def test_nonpositive_caps_rejected(capsys, flag):
    assert run_cli(capsys, "equiv", ex("double"), ex("twice"), flag, "0")[0] == 1


# -- cluster --------------------------------------------------------------------


def test_cluster_command(capsys, tmp_path):
    out_file = tmp_path / "c.json"
    code, out, _ = run_cli(capsys, "cluster", ex("double"), ex("twice"), ex("id"), "--out", str(out_file))
    assert code == 0
    assert out.splitlines() == [f"cluster 0: {ex('double')} {ex('twice')}", f"cluster 1: {ex('id')}"]
    assert json.loads(out_file.read_text())["clusters"] == [[ex("double"), ex("twice")], [ex("id")]]


def test_cluster_policy_flag(capsys):
    a, b = (str(CORPUS / f"{n}.snip") for n in ("square_sum_loop", "square_mul"))
    assert len(run_cli(capsys, "cluster", a, b)[1].splitlines()) == 1
    assert len(run_cli(capsys, "cluster", a, b, "--inconclusive-policy", "separate")[1].splitlines()) == 2


# -- score / evaluate / correctness ---------------------------------------------


@pytest.fixture
def dataset_copy(tmp_path):
    def make(name):
        target = tmp_path / name
        shutil.copy(DATASETS / name, target)
        return target

    return make


def test_score_cc_writes_default_report(capsys, dataset_copy):
    ds = dataset_copy("fixture.json")
    code, out, _ = run_cli(capsys, "score", str(ds), "--metric", "cc", "--jobs", "1")
    assert code == 0
    report = ds.with_name("fixture.cc.score.json")
    assert f"report: {report}" in out
    rows = json.loads(report.read_text())["problems"]
    assert len(rows) == 6
    assert all(isinstance(r["score"], int) for r in rows)


def test_score_se_uniform_all_equivalent(capsys, dataset_copy, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "score", str(dataset_copy("fixture.json")), "--out", str(out_file), "--jobs", "1")
    assert code == 0
    rows = {r["problem_id"]: r for r in json.loads(out_file.read_text())["problems"]}
    assert rows["good-array"]["score"] == 0.0
    assert rows["good-array"]["cluster_count"] == 1


def test_score_unknown_metric(capsys):
    code, _, err = run_cli(capsys, "score", str(DATASETS / "fixture.json"), "--metric", "vibes")
    assert code == 1 and "unknown metric" in err


def test_score_mi_without_followups(capsys, tmp_path):
    ds = str(DATASETS / "fixture_no_followups.json")
    code, _, err = run_cli(capsys, "score", ds, "--metric", "mi-norm", "--out", str(tmp_path / "x.json"))
    assert code == 1 and "follow-up" in err


def test_dataset_errors_exit_2(capsys, tmp_path):
    assert run_cli(capsys, "score", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problems": 3}))
    code, _, err = run_cli(capsys, "score", str(bad))
    assert code == 2 and "$.problems" in err


def test_evaluate_synthetic(capsys, dataset_copy):
    ds = dataset_copy("synthetic.json")
    code, out, _ = run_cli(capsys, "evaluate", str(ds))
    assert code == 0
    summary = json.loads(ds.with_name("synthetic.se-uniform.evaluate.json").read_text())["summary"]
    assert summary["r"] < 0 and summary["p_value"] < 0.05
    assert out.startswith(f"pearson r={summary['r']:.4f}")


def test_evaluate_folds_one(capsys):
    code, _, err = run_cli(capsys, "evaluate", str(DATASETS / "synthetic.json"), "--folds", "1")
    assert code == 1 and "folds" in err


def test_evaluate_zero_variance(capsys, tmp_path):
    # replicate the all-equivalent problem so every uncertainty is 0.0
    doc = json.loads((DATASETS / "fixture.json").read_text())
    base = doc["problems"][0]
    doc["problems"] = [dict(base, id=f"copy-{k}") for k in range(5)]
    ds = tmp_path / "flat.json"
    ds.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "evaluate", str(ds), "--jobs", "1")
    assert code == 1 and "zero variance" in err


def test_evaluate_is_deterministic_across_jobs(capsys, tmp_path):
    ds = str(DATASETS / "synthetic.json")
    reports = []
    for k, jobs in enumerate(["1", "1", "4"]):
        path = tmp_path / f"r{k}.json"
        assert run_cli(capsys, "evaluate", ds, "--seed", "0", "--jobs", jobs, "--out", str(path))[0] == 0
        reports.append(path.read_bytes())
    assert reports[0] == reports[1] == reports[2]


def test_correctness_command(capsys):
    code, out, _ = run_cli(capsys, "correctness", str(DATASETS / "fixture.json"))
    assert code == 0
    lines = [line.split("\t") for line in out.splitlines()]
    assert len(lines) == 6
    assert lines[0][0] == "good-array" and float(lines[0][2]) == 1.0


# -- parser ---------------------------------------------------------------------


def test_help_lists_flags_and_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--help"])
    assert exc.value.code == 0
    text = " ".join(capsys.readouterr().out.split())
    for flag, default in [
        ("--int-bound", "8"), ("--max-array-len", "4"), ("--elem-bound", "4"), ("--unroll-cap", "32"),
        ("--trace-cap", "4096"), ("--pair-timeout-ms", "10000"), ("--inconclusive-policy", "merge"),
        ("--gamma", "1e-10"), ("--step-budget", "1000000"), ("--seed", "0"), ("--folds", "2"),
    ]:
        pattern = rf"{re.escape(flag)}\b(?:(?! --).)*?\(default: {re.escape(default)}\)"
        assert re.search(pattern, text), flag


def test_every_option_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        for action in p._actions:
            if action.dest != "help":
                assert action.help, f"{name} {action.dest}"


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", ex("doubling"), "--bogus"])
    assert exc.value.code == 1
