"""CART decision tree and random forest baselines (Gini, midpoint thresholds)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .dataset import Dataset
from .ensemble import (
    MASK64,
    MaxFeatures,
    _rng,
    derive_estimator_seed,
    run_chunked,
    subset_size,
    two_class_bootstrap,
)
from .errors import ModelError
from .rules import _matrix, midpoint

# relative slack for "the split reduces impurity"
_IMPURITY_EPS = 1e-12


@dataclass
class TreeNode:
    """Leaf when ``feature_index`` is None; otherwise left takes ``x <= threshold``."""

    predicted_proba: float
    n_samples: int
    feature_index: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature_index is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_leaves() + self.right.n_leaves()

    def apply(self, X) -> np.ndarray:
        """Leaf probability reached by each row of ``X``."""
        X = _matrix(X)
        out = np.empty(X.shape[0])
        self._fill(X, np.arange(X.shape[0]), out)
        return out

    def _fill(self, X, idx, out):
        if self.is_leaf:
            out[idx] = self.predicted_proba
            return
        go_left = X[idx, self.feature_index] <= self.threshold
        self.left._fill(X, idx[go_left], out)
        self.right._fill(X, idx[~go_left], out)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    max_features: Union[str, float] = MaxFeatures.SQRT
    master_seed: int = 42

    def __post_init__(self):
        if int(self.n_trees) < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth is not None and int(self.max_depth) < 0:
            raise ValueError("max_depth must be >= 0")
        if int(self.min_samples_leaf) < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        object.__setattr__(self, "max_features", MaxFeatures.parse(self.max_features))
        object.__setattr__(self, "master_seed", int(self.master_seed) & MASK64)


def gini(labels_subset) -> float:
    y = np.asarray(labels_subset)
    if y.size == 0:
        raise ValueError("gini of an empty set is undefined")
    q = float(y.mean())
    return 1.0 - q * q - (1.0 - q) * (1.0 - q)


def best_split(X, y, idx, features):
    """Best ``(feature, threshold, weighted_impurity_sum)`` among ``features`` at node ``idx``.

    Impurity is the sample-weighted child Gini sum, i.e. n times the weighted
    mean. Ties go to the smaller feature index, then the smaller threshold.
    Returns None when no valid split exists.
    """
    return _best_split(X, y, idx, features, 1)


def _best_split(X, y, idx, features, min_leaf):
    cols = X[np.ix_(idx, features)]
    order = np.argsort(cols, axis=0, kind="stable")
    vals = np.ascontiguousarray(np.take_along_axis(cols, order, axis=0).T)
    labs = np.ascontiguousarray(y[idx][order].T.astype(np.uint8))
    f, k, imp = kernels.best_split(vals, labs, min_leaf)
    if f < 0:
        return None
    return int(features[f]), midpoint(vals[f, k], vals[f, k + 1]), imp


def _node_impurity_sum(n_pos: int, n: int) -> float:
    q = n - n_pos
    return n - (n_pos * n_pos + q * q) / n


def _grow(X, y, idx, depth, params: ForestParams, rng, per_node_subset):
    n = len(idx)
    n_pos = int(y[idx].sum())
    node = TreeNode(n_pos / n, n)
    if n_pos in (0, n):
        return node
    if params.max_depth is not None and depth >= params.max_depth:
        return node
    if n < 2 * params.min_samples_leaf:
        return node
    p = X.shape[1]
    if per_node_subset:
        k = subset_size(p, params.max_features)
        features = np.arange(p) if k == p else np.sort(rng.choice(p, size=k, replace=False))
    else:
        features = np.arange(p)
    split = _best_split(X, y, idx, features, params.min_samples_leaf)
    if split is None:
        return node
    j, thr, imp = split
    parent = _node_impurity_sum(n_pos, n)
    if not imp < parent - _IMPURITY_EPS * n:
        return node
    go_left = X[idx, j] <= thr
    node.feature_index, node.threshold = j, thr
    node.left = _grow(X, y, idx[go_left], depth + 1, params, rng, per_node_subset)
    node.right = _grow(X, y, idx[~go_left], depth + 1, params, rng, per_node_subset)
    return node


def fit_tree_arrays(X, y, params: ForestParams = ForestParams(), feature_subset_per_node=False, seed=0):
    X = _matrix(X)
    y = np.asarray(y, dtype=np.int8)
    if len(y) == 0:
        raise ModelError("cannot fit a tree on an empty dataset")
    return _grow(X, y, np.arange(len(y)), 0, params, _rng(seed), feature_subset_per_node)


def fit_tree(d: Dataset, params: ForestParams = ForestParams(), feature_subset_per_node: bool = False, seed: int = 0) -> TreeNode:
    """Greedy CART on ``d``. Feature subsampling per node only if requested."""
    return fit_tree_arrays(d.features, d.labels, params, feature_subset_per_node, seed)


@dataclass
class DecisionTreeModel:
    root: TreeNode
    params: ForestParams
    feature_names: list

    def predict_proba(self, X) -> np.ndarray:
        X = _matrix(X)
        if X.shape[1] != len(self.feature_names):
            raise ModelError(f"model expects {len(self.feature_names)} features, got {X.shape[1]}")
        return self.root.apply(X)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)


@dataclass
class ForestModel:
    trees: list
    bootstrap_seeds: list
    params: ForestParams
    feature_names: list = field(default_factory=list)

    def predict_proba(self, X) -> np.ndarray:
        X = _matrix(X)
        if X.shape[1] != len(self.feature_names):
            raise ModelError(f"model expects {len(self.feature_names)} features, got {X.shape[1]}")
        return np.mean([t.apply(X) for t in self.trees], axis=0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)


def _fit_trees(X, y, feature_names, params: ForestParams, indices):
    out = []
    for i in indices:
        seed = derive_estimator_seed(params.master_seed, i)
        rows = two_class_bootstrap(y, seed, params.n_trees)
        tree = _grow(X[rows], y[rows], np.arange(len(rows)), 0, params,
                     _rng(derive_estimator_seed(seed, 1)), True)
        out.append((tree, seed))
    return out


def fit_forest_arrays(X, y, params: ForestParams = ForestParams(), feature_names=None, workers=None) -> ForestModel:
    X = _matrix(X)
    y = np.asarray(y, dtype=np.int8)
    if y.min() == y.max():
        raise ModelError("both classes must be present to train a forest")
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(X.shape[1])]
    fitted = run_chunked(_fit_trees, X, y, list(feature_names), params, params.n_trees, workers)
    return ForestModel([t for t, _ in fitted], [s for _, s in fitted], params, list(feature_names))


def fit_forest(d: Dataset, params: ForestParams = ForestParams(), workers: Optional[int] = None) -> ForestModel:
    return fit_forest_arrays(d.features, d.labels, params, d.feature_names, workers)
