"""Decision-stump rules and the candidate rule space built from training data."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .dataset import Dataset


class Direction(str, Enum):
    LE = "LE"
    GT = "GT"

    def flip(self) -> "Direction":
        return Direction.GT if self is Direction.LE else Direction.LE


@dataclass(frozen=True)
class ThresholdRule:
    """Boolean stump: ``x[feature] <= threshold`` (LE) or ``x[feature] > threshold`` (GT)."""

    feature_index: int
    feature_name: str
    threshold: float
    direction: Direction

    def evaluate(self, X) -> np.ndarray:
        col = _matrix(X)[:, self.feature_index]
        if self.direction is Direction.LE:
            return col <= self.threshold
        return col > self.threshold

    def complement(self) -> "ThresholdRule":
        return ThresholdRule(self.feature_index, self.feature_name, self.threshold, self.direction.flip())

    def with_index(self, feature_index: int, feature_name: Optional[str] = None) -> "ThresholdRule":
        return ThresholdRule(
            feature_index, feature_name or self.feature_name, self.threshold, self.direction
        )

    def __str__(self):
        op = "<=" if self.direction is Direction.LE else ">"
        return f"{self.feature_name} {op} {self.threshold:.6g}"


def _matrix(X) -> np.ndarray:
    if isinstance(X, Dataset):
        return X.features
    return np.asarray(X, dtype=np.float64)


def midpoint(lo: float, hi: float) -> float:
    t = (lo + hi) / 2.0
    # adjacent doubles: the midpoint may round up onto hi
    return t if t < hi else lo


def _keep_quantile_thresholds(distinct: np.ndarray, m: int) -> np.ndarray:
    """Positions of the ``m`` thresholds nearest to equally spaced quantiles."""
    n_thr = len(distinct) - 1
    thresholds = (distinct[:-1] + distinct[1:]) / 2.0
    targets = np.quantile(distinct, np.arange(1, m + 1) / (m + 1))
    taken = np.zeros(n_thr, dtype=bool)
    for t in targets:
        dist = np.abs(thresholds - t)
        dist[taken] = np.inf
        taken[int(np.argmin(dist))] = True
    return np.flatnonzero(taken)


class RuleSpace:
    """All midpoint stumps of a training matrix, indexed for fast greedy scoring.

    Candidate thresholds ("slots") are ordered by feature index, then
    threshold. Each slot yields two rules, LE at ``2*q`` and GT at ``2*q + 1``,
    so rule index order is exactly the tie-break order.

    ``features`` holds original column indices; ``feature_names`` is indexed
    by original column.
    """

    def __init__(
        self,
        X,
        feature_names: Optional[Sequence[str]] = None,
        feature_subset: Optional[Sequence[int]] = None,
        max_thresholds_per_feature: Optional[int] = None,
    ):
        X = _matrix(X)
        n, p = X.shape
        if feature_subset is None:
            features = np.arange(p, dtype=np.intp)
        else:
            features = np.unique(np.asarray(feature_subset, dtype=np.intp))
            if features.size and (features[0] < 0 or features[-1] >= p):
                raise ValueError("feature subset index out of range")
        if feature_names is None:
            feature_names = [f"f{j}" for j in range(p)]
        self.n_samples = n
        self.features = features
        self.feature_names = list(feature_names)

        cols = X[:, features] if feature_subset is not None else X
        order = np.argsort(cols, axis=0, kind="stable")
        sorted_vals = np.take_along_axis(cols, order, axis=0)
        self.order = np.ascontiguousarray(order.T, dtype=np.intp)
        self._sorted = np.ascontiguousarray(sorted_vals.T)

        breaks = self._sorted[:, :-1] < self._sorted[:, 1:]
        if max_thresholds_per_feature is not None:
            if max_thresholds_per_feature < 1:
                raise ValueError("max_thresholds_per_feature must be >= 1")
            for f in range(len(features)):
                pos = np.flatnonzero(breaks[f])
                if len(pos) > max_thresholds_per_feature:
                    distinct = np.append(self._sorted[f, pos], self._sorted[f, -1])
                    keep = _keep_quantile_thresholds(distinct, max_thresholds_per_feature)
                    breaks[f] = False
                    breaks[f, pos[keep]] = True
        slot_feature, slot_pos = np.nonzero(breaks)
        self.slot_feature = np.ascontiguousarray(slot_feature, dtype=np.intp)
        self.slot_pos = np.ascontiguousarray(slot_pos, dtype=np.intp)
        lo = self._sorted[slot_feature, slot_pos]
        hi = self._sorted[slot_feature, slot_pos + 1]
        thr = (lo + hi) / 2.0
        self.slot_threshold = np.where(thr < hi, thr, lo)

    @property
    def n_rules(self) -> int:
        return 2 * len(self.slot_feature)

    def __len__(self):
        return self.n_rules

    def rule(self, r: int) -> ThresholdRule:
        q, d = divmod(r, 2)
        j = int(self.features[self.slot_feature[q]])
        return ThresholdRule(
            j,
            self.feature_names[j],
            float(self.slot_threshold[q]),
            Direction.LE if d == 0 else Direction.GT,
        )

    def rules(self) -> list:
        return [self.rule(r) for r in range(self.n_rules)]

    def zero_side(self, r: int) -> np.ndarray:
        """Indices of training samples on which rule ``r`` outputs 0."""
        q, d = divmod(r, 2)
        f, k = self.slot_feature[q], self.slot_pos[q]
        return self.order[f, k + 1:] if d == 0 else self.order[f, : k + 1]

    def coverage(self, r: int) -> np.ndarray:
        out = np.ones(self.n_samples, dtype=bool)
        out[self.zero_side(r)] = False
        return out

    def best_rule(self, remaining_neg: np.ndarray, remaining_pos: np.ndarray, p_penalty: float):
        """Index, utility and covered count of the best rule under the tie-break order."""
        return kernels.best_rule(
            self.order,
            self.slot_feature,
            self.slot_pos,
            np.ascontiguousarray(remaining_neg, dtype=np.uint8),
            np.ascontiguousarray(remaining_pos, dtype=np.uint8),
            float(p_penalty),
        )


def enumerate_rules(
    d: Dataset,
    feature_subset: Optional[Sequence[int]] = None,
    max_thresholds_per_feature: Optional[int] = None,
) -> list:
    """Every LE/GT stump at midpoints between adjacent distinct values.

    Ordered by feature index, then threshold, LE before GT. Constant features
    contribute nothing.
    """
    return RuleSpace(d.features, d.feature_names, feature_subset, max_thresholds_per_feature).rules()


def evaluate_rule(r: ThresholdRule, d) -> np.ndarray:
    return r.evaluate(d)
