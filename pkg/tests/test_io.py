import json

import numpy as np
import pytest

from scmforest.baselines import DecisionTreeModel, ForestParams, fit_forest, fit_tree
from scmforest.ensemble import RandomScmParams, fit_ensemble
from scmforest.errors import ModelError
from scmforest.evaluation import LearnerSpec, cross_validate
from scmforest.interpretation import project
from scmforest.io import (
    dumps_model, load_model, model_from_document, model_to_document, save_model, write_cv_folds,
    write_cv_summary, write_predictions, write_projection, write_thresholds,
)
from scmforest.scm import ModelType, ScmParams, fit

from conftest import make_dataset


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 6)) * 1e3
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    return make_dataset(X, y)


def models(d):
    return [
        fit(d, ScmParams(ModelType.DISJUNCTION, 0.5, 3)),
        fit_ensemble(d, RandomScmParams(n_estimators=6, max_features=0.5, model_type_policy="ALTERNATE")),
        DecisionTreeModel(fit_tree(d, ForestParams(max_depth=3)), ForestParams(max_depth=3), list(d.feature_names)),
        fit_forest(d, ForestParams(n_trees=4)),
    ]


def test_round_trip(tmp_path, data):
    for m in models(data):
        path = tmp_path / "m.json"
        save_model(m, path)
        back = load_model(path)
        assert type(back) is type(m)
        assert dumps_model(back) == dumps_model(m)
        assert np.array_equal(back.predict(data.features), m.predict(data.features))
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1 and set(doc) == {"format_version", "kind", "feature_names",
                                                            "master_seed", "payload"}


def test_scm_equality_and_threshold_bits(data):
    m = fit(make_dataset([1, 2, 3, 10, 11, 12], [1, 1, 1, 0, 0, 0]), ScmParams())
    back = model_from_document(json.loads(dumps_model(m)))
    assert back == m and back.rules[0].threshold == 6.5
    rule = json.loads(dumps_model(m))["payload"]["rules"][0]
    assert set(rule) == {"feature", "feature_index", "threshold", "direction"}
    tricky = fit(data, ScmParams())
    again = model_from_document(json.loads(dumps_model(tricky)))
    assert [r.threshold for r in again.rules] == [r.threshold for r in tricky.rules]


def test_rejects_bad_documents(tmp_path, data):
    doc = model_to_document(models(data)[0])
    with pytest.raises(ModelError):
        model_from_document({**doc, "format_version": 99})
    with pytest.raises(ModelError):
        model_from_document({**doc, "kind": "svm"})
    with pytest.raises(ModelError):
        model_from_document({**doc, "payload": {}})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelError):
        load_model(bad)
    with pytest.raises(ModelError):
        load_model(tmp_path / "missing.json")


def test_tables(tmp_path, data):
    r = cross_validate(data, LearnerSpec("scm", {"max_rules": 2}), k=3, seed=1)
    write_cv_folds([r], tmp_path / "f.tsv")
    write_cv_summary([r], tmp_path / "s.tsv")
    folds = (tmp_path / "f.tsv").read_text().splitlines()
    assert folds[0].split("\t") == ["learner", "params", "fold", "split", "accuracy", "balanced_accuracy",
                                    "sensitivity", "specificity", "f1", "auc"]
    assert len(folds) == 1 + 3 * 2 and folds[1].endswith("\tNA")
    summary = (tmp_path / "s.tsv").read_text().splitlines()
    assert summary[0].split("\t")[2:] == ["metric", "train_mean", "train_std", "test_mean", "test_std", "gap"]

    m = fit_ensemble(data, RandomScmParams(n_estimators=5))
    t = project(m, data, 1)
    write_projection(t, tmp_path / "p.tsv")
    write_thresholds(t.rules, tmp_path / "t.tsv")
    lines = (tmp_path / "p.tsv").read_text().splitlines()
    assert len(lines) == data.n_samples + 1 and lines[0].startswith("sample_id\tfeat:")
    values = [float(l.split("\t")[1]) for l in lines[1:]]
    assert values == t.values[:, 0].tolist()
    thr = (tmp_path / "t.tsv").read_text().splitlines()
    assert thr[0] == "feature\tthreshold\tdirection" and float(thr[1].split("\t")[1]) == t.rules[0].threshold

    write_predictions(["a", "b"], [1, 0], [0.75, 0.25], tmp_path / "pred.csv")
    assert (tmp_path / "pred.csv").read_text() == "sample_id,prediction,proba\na,1,0.75\nb,0,0.25\n"
