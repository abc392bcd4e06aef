"""Metrics, stratified cross-validation and grid search over the toolkit's learners."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .baselines import DecisionTreeModel, ForestParams, fit_forest_arrays, fit_tree_arrays
from .dataset import Dataset
from .ensemble import RandomScmParams, _rng, derive_estimator_seed, fit_ensemble_arrays
from .errors import DataError
from .scm import ScmParams, fit_arrays

METRICS = ("accuracy", "balanced_accuracy", "sensitivity", "specificity", "f1", "auc")
LEARNERS = ("scm", "randomscm", "tree", "forest", "majority")


@dataclass(frozen=True)
class MetricSet:
    """Binary classification scores; a metric is None when undefined for the data."""

    accuracy: float
    balanced_accuracy: Optional[float] = None
    sensitivity: Optional[float] = None
    specificity: Optional[float] = None
    f1: Optional[float] = None
    auc: Optional[float] = None

    def get(self, name: str) -> Optional[float]:
        return getattr(self, name)


def roc_auc(labels, scores) -> float:
    """P(score of a random positive > score of a random negative), ties count 1/2."""
    y = np.asarray(labels)
    ranks = rankdata(np.asarray(scores, dtype=np.float64))
    n_pos = int((y == 1).sum())
    n_neg = len(y) - n_pos
    return (ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def compute_metrics(labels, predictions, probas=None) -> MetricSet:
    y = np.asarray(labels).astype(np.int64)
    yhat = np.asarray(predictions).astype(np.int64)
    if y.shape != yhat.shape or (probas is not None and np.shape(probas) != y.shape):
        raise ValueError("labels, predictions and probas must have equal lengths")
    if y.size == 0:
        raise ValueError("cannot score an empty prediction set")
    tp = int(((y == 1) & (yhat == 1)).sum())
    tn = int(((y == 0) & (yhat == 0)).sum())
    fp = int(((y == 0) & (yhat == 1)).sum())
    fn = int(((y == 1) & (yhat == 0)).sum())
    sens = tp / (tp + fn) if tp + fn else None
    spec = tn / (tn + fp) if tn + fp else None
    bal = (sens + spec) / 2 if sens is not None and spec is not None else None
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else None
    auc = None
    if probas is not None and tp + fn and tn + fp:
        auc = float(roc_auc(y, probas))
    return MetricSet((tp + tn) / y.size, bal, sens, spec, f1, auc)


def stratified_kfold(labels, k: int, seed: int) -> list:
    """``k`` disjoint sorted test-index arrays covering ``range(n)``.

    Each class is shuffled and dealt round-robin; the deal for the positive
    class continues where the negative class stopped so fold sizes stay
    within one of each other. Every class needs at least ``k`` members,
    except for leave-one-out (``k == n``).
    """
    y = np.asarray(labels)
    if not 2 <= k <= len(y):
        raise ValueError(f"k must be in [2, n], got {k}")
    rng = _rng(seed)
    assignment = np.empty(len(y), dtype=np.intp)
    offset = 0
    for cls in (0, 1):
        members = np.flatnonzero(y == cls)
        if len(members) < k and k != len(y):
            raise DataError(f"class {cls} has {len(members)} samples, fewer than k={k} folds")
        members = rng.permutation(members)
        assignment[members] = (np.arange(len(members)) + offset) % k
        offset += len(members)
    return [np.flatnonzero(assignment == f) for f in range(k)]


class _Majority:
    def __init__(self, y):
        self.label = int(2 * int(np.sum(y)) >= len(y))

    def predict(self, X):
        return np.full(len(X), self.label, dtype=np.int8)


@dataclass(frozen=True)
class LearnerSpec:
    """A learner family plus hyperparameters, e.g. ``LearnerSpec("scm", {"p_penalty": 1.0})``."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in LEARNERS:
            raise ValueError(f"unknown learner {self.name!r}; choose from {', '.join(LEARNERS)}")

    def describe(self) -> str:
        return json.dumps(self.params, sort_keys=True, default=str)

    def fit(self, X, y, feature_names=None, seed: int = 0, workers: Optional[int] = None):
        if self.name == "scm":
            return fit_arrays(X, y, ScmParams(**self.params), feature_names)
        if self.name == "randomscm":
            params = RandomScmParams(**{**self.params, "master_seed": seed})
            return fit_ensemble_arrays(X, y, params, feature_names, workers)
        if self.name == "forest":
            params = ForestParams(**{**self.params, "master_seed": seed})
            return fit_forest_arrays(X, y, params, feature_names, workers)
        if self.name == "tree":
            params = ForestParams(**self.params)
            names = list(feature_names) if feature_names is not None else [f"f{j}" for j in range(X.shape[1])]
            return DecisionTreeModel(fit_tree_arrays(X, y, params, False, seed), params, names)
        return _Majority(y)


def score_model(model, X, y) -> MetricSet:
    proba = model.predict_proba(X) if hasattr(model, "predict_proba") else None
    pred = model.predict(X)
    return compute_metrics(y, pred, proba)


@dataclass
class FoldResult:
    fold: int
    train: MetricSet
    test: MetricSet


@dataclass
class CvReport:
    learner: str
    params: dict
    master_seed: int
    k: int
    folds: list

    def values(self, split: str, metric: str) -> list:
        return [getattr(getattr(f, split), metric) for f in self.folds]

    def mean(self, split: str, metric: str) -> Optional[float]:
        vals = self.values(split, metric)
        if any(v is None for v in vals):
            return None
        return float(np.mean(vals))

    def std(self, split: str, metric: str) -> Optional[float]:
        vals = self.values(split, metric)
        if any(v is None for v in vals):
            return None
        return float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0

    def gap(self, metric: str = "accuracy") -> Optional[float]:
        tr, te = self.mean("train", metric), self.mean("test", metric)
        if tr is None or te is None:
            return None
        return tr - te


def _xy(d):
    if isinstance(d, Dataset):
        return d.features, d.labels, d.feature_names
    X, y = d
    return np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.int8), None


def cross_validate(d, learner: LearnerSpec, k: int = 5, seed: int = 42, workers: Optional[int] = None) -> CvReport:
    """Stratified k-fold CV reporting train and test metrics per fold.

    ``d`` is a Dataset or an ``(X, y)`` pair. The learner of fold ``i`` is
    seeded with ``derive_estimator_seed(seed, i)``.
    """
    X, y, names = _xy(d)
    folds = []
    for i, test in enumerate(stratified_kfold(y, k, seed)):
        train = np.setdiff1d(np.arange(len(y)), test)
        model = learner.fit(X[train], y[train], names, derive_estimator_seed(seed, i), workers)
        folds.append(FoldResult(i, score_model(model, X[train], y[train]), score_model(model, X[test], y[test])))
    return CvReport(learner.name, dict(learner.params), int(seed), k, folds)


def grid_search(
    d,
    family: str,
    grid: Sequence[dict],
    k: int = 5,
    selection_metric: str = "balanced_accuracy",
    seed: int = 42,
    workers: Optional[int] = None,
):
    """Cross-validate every setting; return ``(best_setting, best_report, all_reports)``.

    The best setting maximizes mean test ``selection_metric``; the earliest
    setting wins ties. Undefined scores rank last.
    """
    if not grid:
        raise ValueError("grid must contain at least one setting")
    if selection_metric not in METRICS:
        raise ValueError(f"unknown metric {selection_metric!r}")
    reports = [cross_validate(d, LearnerSpec(family, dict(g)), k, seed, workers) for g in grid]
    best_i, best_v = 0, -math.inf
    for i, r in enumerate(reports):
        v = r.mean("test", selection_metric)
        v = -math.inf if v is None else v
        if v > best_v:
            best_i, best_v = i, v
    return dict(grid[best_i]), reports[best_i], reports


def default_grids() -> dict:
    """Hyperparameter grids used by the benchmark command."""
    scm = [
        {"model_type": mt, "p_penalty": p, "max_rules": r}
        for mt in ("CONJUNCTION", "DISJUNCTION")
        for p in (0.1, 0.316, 1.0, 3.16, 10.0)
        for r in (1, 3, 5)
    ]
    return {
        "scm": scm,
        "randomscm": [{}],
        "tree": [{"max_depth": d} for d in (3, 10, None)],
        "forest": [{"max_depth": d} for d in (3, 10, None)],
    }


def run_benchmark(d, k: int = 5, seed: int = 42, workers=None, grids: Optional[dict] = None,
                  selection_metric: str = "balanced_accuracy") -> dict:
    """Grid-search every learner family; returns ``{name: (best_setting, best_report, reports)}``."""
    grids = default_grids() if grids is None else grids
    return {
        name: grid_search(d, name, grid, k, selection_metric, seed, workers)
        for name, grid in grids.items()
    }
