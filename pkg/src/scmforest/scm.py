"""Set Covering Machine: a conjunction or disjunction of stumps learned by greedy set cover."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import ModelError
from .rules import RuleSpace, ThresholdRule, _matrix


class ModelType(str, Enum):
    CONJUNCTION = "CONJUNCTION"
    DISJUNCTION = "DISJUNCTION"


class StopReason(str, Enum):
    COVERED = "COVERED"
    MAX_RULES = "MAX_RULES"
    NO_USEFUL_RULE = "NO_USEFUL_RULE"


@dataclass(frozen=True)
class ScmParams:
    model_type: ModelType = ModelType.CONJUNCTION
    p_penalty: float = 1.0
    max_rules: int = 10

    def __post_init__(self):
        object.__setattr__(self, "model_type", ModelType(self.model_type))
        if not self.p_penalty > 0:
            raise ValueError("p_penalty must be > 0")
        if int(self.max_rules) < 1:
            raise ValueError("max_rules must be >= 1")


@dataclass
class ScmModel:
    model_type: ModelType
    rules: list
    params: ScmParams
    training_meta: dict = field(default_factory=dict)
    n_features: Optional[int] = None
    # full-width names of the training matrix; not part of model identity
    feature_names: Optional[list] = field(default=None, compare=False, repr=False)

    def rule_outputs(self, X) -> np.ndarray:
        X = _matrix(X)
        if self.n_features is not None and X.shape[1] != self.n_features:
            raise ModelError(f"model expects {self.n_features} features, got {X.shape[1]}")
        if self.rules and max(r.feature_index for r in self.rules) >= X.shape[1]:
            raise ModelError("rule feature index out of range for input")
        return np.array([r.evaluate(X) for r in self.rules]).reshape(len(self.rules), X.shape[0])

    def predict(self, X) -> np.ndarray:
        out = self.rule_outputs(X)
        if self.model_type is ModelType.CONJUNCTION:
            return out.all(axis=0).astype(np.int8)
        return out.any(axis=0).astype(np.int8)

    def __str__(self):
        joiner = " AND " if self.model_type is ModelType.CONJUNCTION else " OR "
        return joiner.join(f"[{r}]" for r in self.rules)


def utility(rule_coverage, remaining_negatives, remaining_positives, labels=None, p_penalty=1.0):
    """Greedy score of one rule: blocked negatives minus penalized blocked positives.

    Returns ``(score, covered, sacrificed)`` where ``covered`` are remaining
    negatives and ``sacrificed`` remaining positives on which the rule
    outputs 0. ``labels`` is accepted for signature compatibility only; the
    index sets already encode class membership.
    """
    cov = np.asarray(rule_coverage, dtype=bool)
    covered = {int(i) for i in remaining_negatives if not cov[i]}
    sacrificed = {int(i) for i in remaining_positives if not cov[i]}
    return len(covered) - p_penalty * len(sacrificed), covered, sacrificed


def _fit_conjunction_arrays(space: RuleSpace, y: np.ndarray, params: ScmParams):
    if space.n_rules == 0:
        raise ModelError("no candidate rules (every feature is constant)")
    y = np.asarray(y)
    neg = y == 0
    pos = y == 1
    if not neg.any() or not pos.any():
        raise ModelError("both classes must be present to train an SCM")
    chosen, chosen_ids = [], []
    reason = None
    while True:
        r, score, n_covered = space.best_rule(neg, pos, params.p_penalty)
        if n_covered == 0:
            reason = StopReason.NO_USEFUL_RULE
            if not chosen:
                # never return an empty model
                chosen.append(space.rule(r))
                chosen_ids.append(r)
            break
        chosen.append(space.rule(r))
        chosen_ids.append(r)
        zero = space.zero_side(r)
        neg[zero] = False
        pos[zero] = False
        if not neg.any():
            reason = StopReason.COVERED
            break
        if len(chosen) >= params.max_rules:
            reason = StopReason.MAX_RULES
            break
    meta = {
        "rules_considered": space.n_rules,
        "negatives_remaining": int(neg.sum()),
        "positives_remaining": int(pos.sum()),
        "stop_reason": reason.value,
    }
    return chosen, meta, chosen_ids


def fit_conjunction(d: Dataset, params: ScmParams, rules: Optional[RuleSpace] = None) -> ScmModel:
    """Greedy conjunction over a precomputed :class:`RuleSpace` (built from ``d`` if omitted)."""
    if ModelType(params.model_type) is not ModelType.CONJUNCTION:
        raise ValueError("fit_conjunction needs model_type CONJUNCTION")
    if rules is None:
        rules = RuleSpace(d.features, d.feature_names)
    chosen, meta, _ = _fit_conjunction_arrays(rules, d.labels, params)
    return ScmModel(ModelType.CONJUNCTION, chosen, params, meta, d.n_features, list(d.feature_names))


def fit_arrays(
    X,
    y,
    params: ScmParams,
    feature_names: Optional[Sequence[str]] = None,
    feature_subset: Optional[Sequence[int]] = None,
    max_thresholds_per_feature: Optional[int] = None,
) -> ScmModel:
    """Train on raw arrays; rule indices refer to columns of ``X``.

    Disjunctions are learned as conjunctions on flipped labels, then every
    rule is complemented (De Morgan).
    """
    X = _matrix(X)
    y = np.asarray(y, dtype=np.int8)
    space = RuleSpace(X, feature_names, feature_subset, max_thresholds_per_feature)
    if params.model_type is ModelType.CONJUNCTION:
        chosen, meta, _ = _fit_conjunction_arrays(space, y, params)
    else:
        chosen, meta, _ = _fit_conjunction_arrays(space, 1 - y, params)
        chosen = [r.complement() for r in chosen]
    names = list(feature_names) if feature_names is not None else None
    return ScmModel(params.model_type, chosen, params, meta, X.shape[1], names)


def fit(d: Dataset, params: ScmParams, max_thresholds_per_feature: Optional[int] = None) -> ScmModel:
    return fit_arrays(
        d.features, d.labels, params, d.feature_names,
        max_thresholds_per_feature=max_thresholds_per_feature,
    )


def predict(m: ScmModel, d) -> np.ndarray:
    return m.predict(d)
