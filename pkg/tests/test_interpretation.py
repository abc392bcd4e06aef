import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scmforest.ensemble import Estimator, RandomScmModel, RandomScmParams, fit_ensemble
from scmforest.errors import ModelError
from scmforest.interpretation import feature_importance, pattern_counts, project, separation_score
from scmforest.rules import Direction, ThresholdRule
from scmforest.scm import ModelType, ScmModel, ScmParams

from conftest import make_dataset

NAMES = ["a", "b", "c", "d"]


def ensemble(feature_sets, thresholds=None, directions=None):
    est = []
    for i, fs in enumerate(feature_sets):
        rules = [
            ThresholdRule(j, NAMES[j], (thresholds or {}).get((i, j), 1.0),
                          (directions or {}).get((i, j), Direction.GT))
            for j in fs
        ]
        est.append(Estimator(ScmModel(ModelType.CONJUNCTION, rules, ScmParams(), n_features=4), [0, 1, 2, 3], i, 1.0))
    return RandomScmModel(est, RandomScmParams(n_estimators=len(est)), NAMES)


def test_counts_example():
    m = ensemble([[0], [0, 1], [0, 1]])
    top1 = pattern_counts(m, 1)[0]
    assert top1.features == (0,) and top1.count == 3 and top1.frequency == 1.0
    top2 = pattern_counts(m, 2)[0]
    assert top2.features == (0, 1) and top2.count == 2
    assert pattern_counts(m, 3) == []


def test_single_estimator_subsets():
    pats = pattern_counts(ensemble([[0, 1, 2]]), 2)
    assert [p.features for p in pats] == [(0, 1), (0, 2), (1, 2)]
    assert all(p.count == 1 for p in pats)


def test_importance():
    imp = feature_importance(ensemble([[0], [0, 1], [0, 1]]))
    assert list(imp) == ["a", "b"]
    assert imp["a"] == 1.0 and imp["b"] == pytest.approx(2 / 3)


def test_representative_rule():
    m = ensemble([[0], [0], [0]], thresholds={(0, 0): 1.0, (1, 0): 3.0, (2, 0): 10.0},
                 directions={(2, 0): Direction.LE})
    rule = pattern_counts(m, 1)[0].representative_rules[0]
    assert rule.direction is Direction.GT and rule.threshold == 2.0
    tie = ensemble([[0], [0]], thresholds={(0, 0): 1.0, (1, 0): 5.0}, directions={(1, 0): Direction.LE})
    rule = pattern_counts(tie, 1)[0].representative_rules[0]
    assert rule.direction is Direction.LE and rule.threshold == 5.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sets(st.integers(0, 3), min_size=1, max_size=4), min_size=1, max_size=8), st.randoms())
def test_count_properties(sets, rnd):
    sets = [sorted(s) for s in sets]
    m = ensemble(sets)
    shuffled = list(sets)
    rnd.shuffle(shuffled)
    for k in (1, 2, 3):
        a = [(p.features, p.count) for p in pattern_counts(m, k)]
        assert a == [(p.features, p.count) for p in pattern_counts(ensemble(shuffled), k)]
        assert all(0 < p.frequency <= 1 for p in pattern_counts(m, k))
    k1 = pattern_counts(m, 1)
    assert sum(p.count for p in k1) == sum(len(s) for s in sets)
    assert sum(p.frequency for p in k1) == pytest.approx(np.mean([len(s) for s in sets]))


def planted_pair_data(n_copies=16):
    grid = np.array([[a, b] for a in (0, 1) for b in (0, 1)] * n_copies, dtype=float)
    return make_dataset(grid, (grid[:, 0] * grid[:, 1]).astype(int))


def test_projection_on_planted_pair():
    d = planted_pair_data()
    m = fit_ensemble(d, RandomScmParams(n_estimators=25, master_seed=3))
    t = project(m, d, 2)
    assert t.feature_names == ("f0", "f1")
    assert t.header() == ["sample_id", "feat:f0", "feat:f1", "label"]
    assert t.n_rows == d.n_samples and t.values.shape == (d.n_samples, 2)
    assert np.array_equal(t.values, d.features[:, [0, 1]])
    assert separation_score(t) == 1.0
    one = project(m, d, 1)
    assert len(one.header()) == 3
    with pytest.raises(ModelError):
        project(m, d, 2, rank=50)


def test_separation_degenerate_and_permuted():
    d = planted_pair_data()
    m = fit_ensemble(d, RandomScmParams(n_estimators=15, master_seed=2))
    t = project(m, d, 2)
    never = [ThresholdRule(0, "f0", 5.0, Direction.GT)]
    assert separation_score(t, never) == 0.5
    rng = np.random.default_rng(0)
    scores = []
    X = rng.normal(size=(60, 2))
    for _ in range(20):
        y = rng.permutation([0, 1] * 30)
        pd = make_dataset(X, y)
        pm = fit_ensemble(pd, RandomScmParams(n_estimators=15, master_seed=1))
        scores.append(separation_score(project(pm, pd, 1)))
    assert abs(np.mean(scores) - 0.5) <= 0.1
    single = t.__class__(t.sample_ids[:2], t.feature_names, t.values[:2], np.array([1, 1]), t.rules)
    assert separation_score(single) is None
