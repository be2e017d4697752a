import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symclust.clustering import ClusterSet
from symclust.errors import UsageError
from symclust.metrics import (
    IterativeRecord,
    Mode,
    ResponseProb,
    cluster_masses,
    entropy,
    length_normalize,
    llm_probability,
    mutual_information,
    mutual_information_from,
    response_distribution,
    semantic_entropy,
    softmax,
    softmax_distribution,
    uniform_distribution,
)

mpmath.mp.dps = 50


def rp(rid, logprob=0.0, tokens=1):
    return ResponseProb(rid, logprob, tokens)


def clusters_of(sizes):
    out, k = [], 0
    for s in sizes:
        out.append([f"s{k + j}" for j in range(s)])
        k += s
    return ClusterSet(out)


# -- length normalisation and softmax ------------------------------------


def test_length_normalize():
    assert length_normalize(rp("a", -20.0, 10)) == -2.0
    assert length_normalize(rp("a", 0.0, 7)) == 0.0
    ref = mpmath.mpf("-198.4") / 198
    assert abs(length_normalize(rp("a", -198.4, 198)) - float(ref)) < 1e-12
    with pytest.raises(UsageError):
        length_normalize(rp("a", -1.0, 0))


def test_softmax_examples():
    assert softmax([0.0, 0.0]) == [0.5, 0.5]
    assert softmax([-1.0, -1.0, -1.0]) == pytest.approx([1 / 3] * 3, abs=1e-15)
    z = sum(mpmath.exp(v) for v in (-1, -2, -3))
    ref = [float(mpmath.exp(v) / z) for v in (-1, -2, -3)]
    assert softmax([-1.0, -2.0, -3.0]) == pytest.approx(ref, abs=1e-12)
    assert softmax([-1.0, -2.0, -3.0]) == pytest.approx([0.66524, 0.24473, 0.09003], abs=1e-5)


@pytest.mark.parametrize("bad", [[], [float("nan")], [0.0, float("-inf")], [float("inf")]])
def test_softmax_rejects_bad_input(bad):
    with pytest.raises(UsageError):
        softmax(bad)


def test_softmax_does_not_underflow():
    probs = softmax([-5000.0, -5001.0])
    assert probs[0] > probs[1] > 0.0
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=8),
    st.floats(-1e3, 1e3),
)
def test_softmax_shift_invariance(values, c):
    a = softmax(values)
    b = softmax([v + c for v in values])
    assert a == pytest.approx(b, abs=1e-12)
    assert math.fsum(a) == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= p <= 1.0 for p in a)


def test_softmax_distribution_uses_length_normalisation():
    d = softmax_distribution([rp("a", -10.0, 10), rp("b", -20.0, 20)])
    assert d == {"a": 0.5, "b": 0.5}


def test_uniform_distribution():
    assert uniform_distribution(5) == [0.2] * 5
    assert uniform_distribution(1) == [1.0]
    assert uniform_distribution(3) == [1 / 3] * 3
    with pytest.raises(UsageError):
        uniform_distribution(0)


def test_response_distribution_modes():
    rs = [rp("a", -1.0, 1), rp("b", -5.0, 1)]
    assert response_distribution(rs, Mode.UNIFORM) == {"a": 0.5, "b": 0.5}
    assert response_distribution(rs, Mode.LENGTH_NORMALIZED)["a"] > 0.9


# -- semantic entropy ----------------------------------------------------


def test_single_cluster_entropy_is_zero():
    c = ClusterSet([["a", "b", "c"]])
    assert semantic_entropy(c, {"a": 0.48, "b": 0.29, "c": 0.23}) == 0.0
    assert semantic_entropy(c, {"a": 1 / 3, "b": 1 / 3, "c": 1 / 3}) == 0.0


def test_uniform_two_three_split():
    c = clusters_of([2, 3])
    d = {f"s{k}": 0.2 for k in range(5)}
    ref = -(mpmath.mpf("0.4") * mpmath.log("0.4") + mpmath.mpf("0.6") * mpmath.log("0.6"))
    assert semantic_entropy(c, d) == pytest.approx(float(ref), abs=1e-12)
    assert semantic_entropy(c, d) == pytest.approx(0.67301, abs=1e-5)


def test_entropy_id_mismatch():
    with pytest.raises(UsageError):
        semantic_entropy(ClusterSet([["a"], ["b"]]), {"a": 1.0})


def test_cluster_masses():
    c = ClusterSet([["a", "c"], ["b"]])
    assert cluster_masses(c, {"a": 0.25, "b": 0.5, "c": 0.25}) == [0.5, 0.5]


def test_zero_mass_clusters_contribute_nothing():
    assert entropy([1.0, 0.0]) == 0.0


_sizes = st.lists(st.integers(1, 5), min_size=1, max_size=6)


@settings(max_examples=200)
@given(_sizes, st.data())
def test_entropy_bounds(sizes, data):
    c = clusters_of(sizes)
    n = sum(sizes)
    weights = data.draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
    if sum(weights) == 0:
        weights = [1.0] * n
    z = math.fsum(weights)
    d = {f"s{k}": w / z for k, w in enumerate(weights)}
    h = semantic_entropy(c, d)
    assert -1e-12 <= h <= math.log(len(sizes)) + 1e-9
    masses = cluster_masses(c, d)
    single = sum(1 for m in masses if m > 0) == 1
    assert (h == 0.0) == single


@settings(max_examples=200)
@given(_sizes, st.data())
def test_uniform_entropy_refinement_and_permutation(sizes, data):
    def se_uniform(sz):
        n = sum(sz)
        return semantic_entropy(clusters_of(sz), {f"s{k}": 1 / n for k in range(n)})

    h = se_uniform(sizes)
    shuffled = data.draw(st.permutations(sizes))
    assert se_uniform(shuffled) == pytest.approx(h, abs=1e-12)
    splittable = [i for i, s in enumerate(sizes) if s > 1]
    if splittable:
        i = data.draw(st.sampled_from(splittable))
        cut = data.draw(st.integers(1, sizes[i] - 1))
        refined = sizes[:i] + [cut, sizes[i] - cut] + sizes[i + 1:]
        assert se_uniform(refined) >= h - 1e-12


def test_uniform_mass_is_maximal():
    for k in range(1, 7):
        assert semantic_entropy(clusters_of([1] * k), {f"s{j}": 1 / k for j in range(k)}) == pytest.approx(
            math.log(k), abs=1e-12
        )


# -- mutual information ----------------------------------------------------


def test_mi_single_cluster_is_zero():
    assert mutual_information_from([1.0], [[1.0]]) == 0.0


def test_mi_independent_conditionals_are_zero():
    row = [0.2, 0.5, 0.3]
    assert abs(mutual_information_from([0.1, 0.6, 0.3], [row, row, row])) < 1e-15


def test_mi_deterministic_coupling_is_ln2():
    mi = mutual_information_from([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]], 1e-12, 1e-12)
    assert mi == pytest.approx(math.log(2), abs=1e-6)


def test_mi_rejects_bad_gamma():
    with pytest.raises(UsageError):
        mutual_information_from([1.0], [[1.0]], 0.0, 1e-10)
    with pytest.raises(UsageError):
        mutual_information_from([1.0], [[1.0]], 1e-10, -1.0)


def test_mi_reference_value():
    mu1 = [0.3, 0.7]
    cond = [[0.9, 0.1], [0.2, 0.8]]
    second = [sum(mu1[i] * cond[i][t] for i in range(2)) for t in range(2)]
    g = mpmath.mpf("1e-10")
    ref = mpmath.fsum(
        mpmath.mpf(mu1[i]) * cond[i][t]
        * mpmath.log((mpmath.mpf(mu1[i]) * cond[i][t] + g) / (mpmath.mpf(mu1[i]) * second[t] + g))
        for i in range(2) for t in range(2)
    )
    assert mutual_information_from(mu1, cond) == pytest.approx(float(ref), abs=1e-12)


def test_mi_from_record_coupled():
    record = IterativeRecord(
        [rp("a"), rp("b")],
        {"a": [rp("a1"), rp("a2")], "b": [rp("b1")]},
    )
    clusters = ClusterSet([["a", "a1", "a2"], ["b", "b1"]])
    mi = mutual_information(record, clusters, Mode.UNIFORM, 1e-12, 1e-12)
    assert mi == pytest.approx(math.log(2), abs=1e-6)


def test_mi_from_record_single_cluster():
    record = IterativeRecord([rp("a", -3.0, 2), rp("b", -1.0, 4)], {"a": [rp("c", -2.0, 3)], "b": [rp("d")]})
    clusters = ClusterSet([["a", "b", "c", "d"]])
    assert mutual_information(record, clusters, Mode.LENGTH_NORMALIZED) == 0.0


def test_mi_conditional_is_weighted_average():
    # a and b share a cluster; their follow-ups split differently
    record = IterativeRecord(
        [rp("a"), rp("b"), rp("c")],
        {"a": [rp("a1")], "b": [rp("b1")], "c": [rp("c1")]},
    )
    clusters = ClusterSet([["a", "b", "a1"], ["c", "b1", "c1"]])
    mi = mutual_information(record, clusters, Mode.UNIFORM, 1e-10, 1e-10)
    expected = mutual_information_from([2 / 3, 1 / 3], [[0.5, 0.5], [0.0, 1.0]], 1e-10, 1e-10)
    assert mi == pytest.approx(expected, abs=1e-15)


def test_mi_requires_followups():
    record = IterativeRecord([rp("a")], {"a": []})
    with pytest.raises(UsageError):
        mutual_information(record, ClusterSet([["a"]]))


def test_mi_followups_must_be_clustered():
    record = IterativeRecord([rp("a")], {"a": [rp("z")]})
    with pytest.raises(UsageError):
        mutual_information(record, ClusterSet([["a"]]))


@settings(max_examples=200)
@given(st.integers(1, 4), st.data())
def test_mi_gamma_stability(k, data):
    mu1 = data.draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    cond = [data.draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k)) for _ in range(k)]
    cond = [row if sum(row) > 0 else [1.0] * k for row in cond]
    a = mutual_information_from(mu1, cond, 1e-10, 1e-10)
    b = mutual_information_from(mu1, cond, 1e-11, 1e-11)
    assert abs(a - b) < 1e-6
    assert a > -1e-6


# -- baseline ----------------------------------------------------------------


def test_llm_probability():
    assert llm_probability(rp("a", 0.0, 1)) == 1.0
    assert llm_probability(rp("a", -math.log(2), 1)) == pytest.approx(0.5, abs=1e-15)
    assert llm_probability(rp("a", -10.0, 5)) == pytest.approx(float(mpmath.exp(-2)), abs=1e-15)
    assert llm_probability(rp("a", -10.0, 5), Mode.RAW) == pytest.approx(math.exp(-10), abs=1e-18)
