"""Frequent features and feature conjunctions in a fitted RandomSCM ensemble."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .dataset import Dataset
from .ensemble import RandomScmModel
from .errors import ModelError
from .evaluation import compute_metrics
from .rules import Direction, ThresholdRule


@dataclass(frozen=True)
class ConjunctionPattern:
    features: tuple
    count: int
    frequency: float
    representative_rules: tuple

    @property
    def k(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class ProjectionTable:
    sample_ids: tuple
    feature_names: tuple
    values: np.ndarray
    labels: np.ndarray
    rules: tuple

    @property
    def n_rows(self) -> int:
        return len(self.sample_ids)

    def header(self) -> list:
        return ["sample_id", *(f"feat:{n}" for n in self.feature_names), "label"]


def _feature_sets(m: RandomScmModel) -> list:
    return [frozenset(r.feature_index for r in e.model.rules) for e in m.estimators]


def _representative_rules(m: RandomScmModel, features: tuple, holders: list) -> tuple:
    by_feature = defaultdict(list)
    for e in holders:
        for r in e.model.rules:
            if r.feature_index in features:
                by_feature[r.feature_index].append(r)
    reps = []
    for j in features:
        occ = by_feature[j]
        n_le = sum(r.direction is Direction.LE for r in occ)
        direction = Direction.LE if n_le >= len(occ) - n_le else Direction.GT
        thresholds = [r.threshold for r in occ if r.direction is direction]
        reps.append(ThresholdRule(j, m.feature_names[j], float(np.median(thresholds)), direction))
    return tuple(reps)


def pattern_counts(m: RandomScmModel, k: int) -> list:
    """Rank feature sets of size ``k`` by how many estimators use all of them.

    Each estimator contributes every ``k``-subset of its distinct rule
    features once. Ties rank lexicographically by feature indices.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sets = _feature_sets(m)
    counts = Counter()
    for fs in sets:
        counts.update(combinations(sorted(fs), k))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    n_est = len(m.estimators)
    out = []
    for features, count in ranked:
        holders = [e for e, fs in zip(m.estimators, sets) if fs.issuperset(features)]
        out.append(
            ConjunctionPattern(features, count, count / n_est, _representative_rules(m, features, holders))
        )
    return out


def feature_importance(m: RandomScmModel) -> dict:
    """Fraction of estimators using each feature, sorted descending then by name."""
    counts = Counter()
    for fs in _feature_sets(m):
        counts.update(fs)
    n_est = len(m.estimators)
    items = sorted(
        ((m.feature_names[j], c / n_est) for j, c in counts.items()), key=lambda kv: (-kv[1], kv[0])
    )
    return dict(items)


def project(m: RandomScmModel, d: Dataset, k: int, rank: int = 1) -> ProjectionTable:
    """Raw values of the ``rank``-th most frequent size-``k`` pattern, one row per sample."""
    patterns = pattern_counts(m, k)
    if not 1 <= rank <= len(patterns):
        raise ModelError(f"rank {rank} out of range: {len(patterns)} patterns of size {k}")
    pattern = patterns[rank - 1]
    names = tuple(m.feature_names[j] for j in pattern.features)
    cols = [d.feature_index(n) for n in names]
    return ProjectionTable(
        d.sample_ids, names, d.features[:, cols].copy(), d.labels.copy(), pattern.representative_rules
    )


def separation_score(t: ProjectionTable, rules=None) -> Optional[float]:
    """Balanced accuracy of the conjunction of ``rules`` on the table; None if single-class."""
    rules = t.rules if rules is None else rules
    pos = {n: i for i, n in enumerate(t.feature_names)}
    pred = np.ones(t.n_rows, dtype=bool)
    for r in rules:
        col = t.values[:, pos[r.feature_name]]
        pred &= col <= r.threshold if r.direction is Direction.LE else col > r.threshold
    return compute_metrics(t.labels, pred.astype(np.int8)).balanced_accuracy
