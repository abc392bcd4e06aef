import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scmforest.rules import Direction, RuleSpace, ThresholdRule, enumerate_rules, evaluate_rule

from conftest import make_dataset, random_dataset
from oracles import fires, stumps


def test_midpoints_and_count():
    rules = enumerate_rules(make_dataset([1, 2, 2, 4], [0, 1, 0, 1]))
    assert [(r.threshold, r.direction) for r in rules] == [
        (1.5, Direction.LE), (1.5, Direction.GT), (3.0, Direction.LE), (3.0, Direction.GT)
    ]


def test_constant_feature_has_no_rules():
    assert enumerate_rules(make_dataset([5, 5, 5], [0, 1, 0])) == []


def test_rule_count_two_features():
    d = make_dataset([[1, 0], [2, 0], [3, 1]], [0, 1, 1])
    assert len(enumerate_rules(d)) == 6


def test_evaluate():
    d = make_dataset([1, 12], [0, 1])
    le = ThresholdRule(0, "f0", 6.5, Direction.LE)
    assert evaluate_rule(le, d).tolist() == [True, False]
    assert evaluate_rule(le.complement(), d).tolist() == [False, True]


def test_feature_subset_keeps_original_indices():
    d = make_dataset([[1, 5, 9], [2, 6, 8], [3, 7, 7]], [0, 1, 1])
    rules = enumerate_rules(d, feature_subset=[2])
    assert {r.feature_index for r in rules} == {2}
    assert [r.threshold for r in rules[::2]] == [7.5, 8.5]


def test_max_thresholds_per_feature():
    x = np.arange(100, dtype=float)
    d = make_dataset(x, (x > 50).astype(int))
    rules = enumerate_rules(d, max_thresholds_per_feature=3)
    assert [r.threshold for r in rules[::2]] == [24.5, 49.5, 74.5]
    assert len(enumerate_rules(d, max_thresholds_per_feature=500)) == 198


def test_adjacent_doubles():
    lo = 1.0
    hi = np.nextafter(lo, 2.0)
    space = RuleSpace(np.array([[lo], [hi]]))
    r = space.rule(0)
    assert r.evaluate(np.array([[lo], [hi]])).tolist() == [True, False]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_matches_definition(seed):
    d = random_dataset(np.random.default_rng(seed), 15, 4, levels=5)
    got = [(r.feature_index, r.threshold, r.direction.value) for r in enumerate_rules(d)]
    assert got == stumps(d.features)
    for r, ref in zip(enumerate_rules(d), stumps(d.features)):
        assert np.array_equal(r.evaluate(d), fires(ref, d.features))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_coverage_independent_of_midpoint_variant(seed):
    d = random_dataset(np.random.default_rng(seed), 15, 3, levels=6)
    X = d.features
    for r in enumerate_rules(d):
        vals = np.unique(X[:, r.feature_index])
        k = np.searchsorted(vals, r.threshold)
        alt = vals[k - 1] + 0.25 * (vals[k] - vals[k - 1])
        moved = ThresholdRule(r.feature_index, r.feature_name, alt, r.direction)
        assert np.array_equal(r.evaluate(X), moved.evaluate(X))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["exp", "cube", "affine"]))
def test_monotone_transform_invariance(seed, kind):
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, 20, 4)
    j = int(rng.integers(d.n_features))
    f = {"exp": np.exp, "cube": lambda v: v ** 3 + v, "affine": lambda v: 3 * v - 7}[kind]
    X2 = d.features.copy()
    X2[:, j] = f(X2[:, j])
    a = RuleSpace(d.features)
    b = RuleSpace(X2)
    assert a.n_rules == b.n_rules
    for r in range(a.n_rules):
        ra, rb = a.rule(r), b.rule(r)
        assert (ra.feature_index, ra.direction) == (rb.feature_index, rb.direction)
        assert np.array_equal(a.coverage(r), b.coverage(r))
        assert np.array_equal(ra.evaluate(d.features), a.coverage(r))


def test_complement_is_bitwise_not():
    rng = np.random.default_rng(3)
    d = random_dataset(rng)
    for r in enumerate_rules(d):
        assert np.array_equal(r.evaluate(d), ~r.complement().evaluate(d))
