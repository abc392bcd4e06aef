"""RandomSCM: bagged SCMs with per-estimator feature subsets and penalty draws."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from .dataset import Dataset
from .errors import ModelError
from .rules import _matrix
from .scm import ModelType, ScmModel, ScmParams, fit_arrays

MASK64 = (1 << 64) - 1
MAX_BOOTSTRAP_RETRIES = 64


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_estimator_seed(master_seed: int, estimator_index: int) -> int:
    if estimator_index < 0:
        raise ValueError("estimator_index must be >= 0")
    return splitmix64((int(master_seed) + int(estimator_index)) & MASK64)


def _rng(seed: int) -> np.random.Generator:
    # PCG64 seeded through numpy's SeedSequence
    return np.random.default_rng(int(seed) & MASK64)


def bootstrap_indices(n: int, seed: int) -> np.ndarray:
    """``n`` uniform draws with replacement from ``range(n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _rng(seed).integers(0, n, size=n)


class MaxFeatures:
    """Per-estimator feature budget: ``ALL``, ``SQRT``, ``LOG2`` or a fraction in (0, 1]."""

    ALL = "ALL"
    SQRT = "SQRT"
    LOG2 = "LOG2"

    @staticmethod
    def parse(value) -> Union[str, float]:
        if isinstance(value, str):
            v = value.strip().upper()
            if v in ("ALL", "SQRT", "LOG2"):
                return v
            value = float(value)
        f = float(value)
        if not 0 < f <= 1:
            raise ValueError(f"max_features fraction must be in (0, 1], got {value}")
        return f


def subset_size(p: int, policy) -> int:
    policy = MaxFeatures.parse(policy)
    if policy == MaxFeatures.ALL:
        k = p
    elif policy == MaxFeatures.SQRT:
        k = math.ceil(math.sqrt(p))
    elif policy == MaxFeatures.LOG2:
        k = max(1, math.ceil(math.log2(p)))
    else:
        k = max(1, math.ceil(policy * p))
    return min(k, p)


def sample_feature_subset(p: int, policy, seed: int) -> np.ndarray:
    if p < 1:
        raise ValueError("p must be >= 1")
    k = subset_size(p, policy)
    if k == p:
        return np.arange(p)
    return np.sort(_rng(seed).choice(p, size=k, replace=False))


def two_class_bootstrap(y: np.ndarray, seed: int, stride: int) -> np.ndarray:
    """Bootstrap rows, redrawing with ``seed + t*stride`` until both classes appear."""
    n = len(y)
    for t in range(MAX_BOOTSTRAP_RETRIES):
        rows = bootstrap_indices(n, (seed + t * stride) & MASK64)
        ys = y[rows]
        if ys.min() != ys.max():
            return rows
    raise ModelError(
        f"{MAX_BOOTSTRAP_RETRIES} consecutive single-class bootstrap replicates; "
        "class balance is too degenerate"
    )


@dataclass(frozen=True)
class RandomScmParams:
    n_estimators: int = 100
    max_features: Union[str, float] = MaxFeatures.ALL
    p_options: tuple = (0.1, 0.316, 1.0, 3.16, 10.0)
    max_rules: int = 5
    model_type_policy: str = "CONJUNCTION"
    master_seed: int = 42

    def __post_init__(self):
        if int(self.n_estimators) < 1:
            raise ValueError("n_estimators must be >= 1")
        opts = tuple(float(v) for v in self.p_options)
        if not opts or any(not v > 0 for v in opts):
            raise ValueError("p_options must be a non-empty list of positive reals")
        policy = str(self.model_type_policy).upper()
        if policy not in ("CONJUNCTION", "DISJUNCTION", "ALTERNATE"):
            raise ValueError(f"unknown model_type_policy {self.model_type_policy!r}")
        object.__setattr__(self, "p_options", opts)
        object.__setattr__(self, "max_features", MaxFeatures.parse(self.max_features))
        object.__setattr__(self, "model_type_policy", policy)
        object.__setattr__(self, "master_seed", int(self.master_seed) & MASK64)

    def model_type_for(self, i: int) -> ModelType:
        if self.model_type_policy == "ALTERNATE":
            return ModelType.CONJUNCTION if i % 2 == 0 else ModelType.DISJUNCTION
        return ModelType(self.model_type_policy)


@dataclass
class Estimator:
    model: ScmModel
    feature_subset: list
    bootstrap_seed: int
    p_used: float


@dataclass
class RandomScmModel:
    estimators: list
    params: RandomScmParams
    feature_names: list
    vote_threshold: float = 0.5

    def __post_init__(self):
        if not 0 < self.vote_threshold <= 1:
            raise ValueError("vote_threshold must be in (0, 1]")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def votes(self, X) -> np.ndarray:
        X = _matrix(X)
        if X.shape[1] != self.n_features:
            raise ModelError(f"model expects {self.n_features} features, got {X.shape[1]}")
        return np.array([e.model.predict(X) for e in self.estimators], dtype=np.int64)

    def predict_proba(self, X) -> np.ndarray:
        return self.votes(X).sum(axis=0) / len(self.estimators)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= self.vote_threshold).astype(np.int8)


def _fit_one(X, y, feature_names, params: RandomScmParams, i: int) -> Estimator:
    seed = derive_estimator_seed(params.master_seed, i)
    rows = two_class_bootstrap(y, seed, params.n_estimators)
    subset = sample_feature_subset(X.shape[1], params.max_features, derive_estimator_seed(seed, 1))
    pick = _rng(derive_estimator_seed(seed, 2)).integers(len(params.p_options))
    p_used = params.p_options[int(pick)]
    scm_params = ScmParams(params.model_type_for(i), p_used, params.max_rules)
    subset_arg = None if len(subset) == X.shape[1] else subset
    model = fit_arrays(X[rows], y[rows], scm_params, feature_names, feature_subset=subset_arg)
    return Estimator(model, [int(j) for j in subset], seed, p_used)


def _fit_chunk(X, y, feature_names, params, indices):
    return [_fit_one(X, y, feature_names, params, i) for i in indices]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SCMFOREST_WORKERS", "1")))
    except ValueError:
        return 1


def run_chunked(func, X, y, feature_names, params, n_items: int, workers: Optional[int]):
    """Evaluate ``func(X, y, names, params, indices)`` over index chunks, in order."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or n_items == 1:
        return func(X, y, feature_names, params, range(n_items))
    chunks = [c for c in np.array_split(np.arange(n_items), min(workers, n_items)) if len(c)]
    parts = Parallel(n_jobs=workers)(
        delayed(func)(X, y, feature_names, params, c.tolist()) for c in chunks
    )
    return [e for part in parts for e in part]


def fit_ensemble_arrays(X, y, params: RandomScmParams, feature_names=None, workers=None) -> RandomScmModel:
    X = _matrix(X)
    y = np.asarray(y, dtype=np.int8)
    if y.min() == y.max():
        raise ModelError("both classes must be present to train RandomSCM")
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(X.shape[1])]
    feature_names = list(feature_names)
    estimators = run_chunked(_fit_chunk, X, y, feature_names, params, params.n_estimators, workers)
    return RandomScmModel(estimators, params, feature_names)


def fit_ensemble(d: Dataset, params: RandomScmParams, workers: Optional[int] = None) -> RandomScmModel:
    """Train ``params.n_estimators`` SCMs on bootstrap replicates of ``d``.

    Every random draw of estimator ``i`` is derived from
    ``(params.master_seed, i)``, so the result does not depend on ``workers``.
    """
    return fit_ensemble_arrays(d.features, d.labels, params, d.feature_names, workers)


def predict_proba(m: RandomScmModel, d) -> np.ndarray:
    return m.predict_proba(d)


def predict(m: RandomScmModel, d) -> np.ndarray:
    return m.predict(d)
