"""Model files (JSON) and report tables (TSV/CSV).

Model file layout::

    {"format_version": 1,
     "kind": "scm" | "randomscm" | "tree" | "forest",
     "feature_names": [...],
     "master_seed": int or null,
     "payload": {...}}

Rules are ``{"feature", "feature_index", "threshold", "direction"}``. Floats
are written with Python's shortest round-trip repr, so loading restores the
exact doubles.

Tables:

* CV folds TSV: ``learner, params, fold, split, accuracy, balanced_accuracy,
  sensitivity, specificity, f1, auc`` (one row per learner x fold x split).
* CV summary TSV: ``learner, params, metric, train_mean, train_std,
  test_mean, test_std, gap``.
* Projection TSV: ``sample_id, feat:<name>..., label``; sidecar
  ``feature, threshold, direction``.
* Predictions CSV: ``sample_id, prediction, proba``.

Undefined values are written as ``NA``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .baselines import DecisionTreeModel, ForestParams, ForestModel, TreeNode
from .ensemble import Estimator, RandomScmModel, RandomScmParams
from .errors import ModelError
from .evaluation import METRICS
from .rules import Direction, ThresholdRule
from .scm import ModelType, ScmModel, ScmParams

FORMAT_VERSION = 1
KINDS = ("scm", "randomscm", "tree", "forest")


def _rule_to_dict(r: ThresholdRule) -> dict:
    return {
        "feature": r.feature_name,
        "feature_index": int(r.feature_index),
        "threshold": float(r.threshold),
        "direction": r.direction.value,
    }


def _rule_from_dict(d: dict) -> ThresholdRule:
    return ThresholdRule(int(d["feature_index"]), str(d["feature"]), float(d["threshold"]), Direction(d["direction"]))


def _scm_to_dict(m: ScmModel) -> dict:
    return {
        "model_type": m.model_type.value,
        "params": {
            "model_type": m.params.model_type.value,
            "p_penalty": float(m.params.p_penalty),
            "max_rules": int(m.params.max_rules),
        },
        "rules": [_rule_to_dict(r) for r in m.rules],
        "training_meta": dict(m.training_meta),
        "n_features": m.n_features,
    }


def _scm_from_dict(d: dict) -> ScmModel:
    return ScmModel(
        ModelType(d["model_type"]),
        [_rule_from_dict(r) for r in d["rules"]],
        ScmParams(**d["params"]),
        dict(d["training_meta"]),
        d["n_features"],
    )


def _rscm_params_to_dict(p: RandomScmParams) -> dict:
    return {
        "n_estimators": int(p.n_estimators),
        "max_features": p.max_features,
        "p_options": list(p.p_options),
        "max_rules": int(p.max_rules),
        "model_type_policy": p.model_type_policy,
        "master_seed": int(p.master_seed),
    }


def _forest_params_to_dict(p: ForestParams) -> dict:
    return {
        "n_trees": int(p.n_trees),
        "max_depth": p.max_depth,
        "min_samples_leaf": int(p.min_samples_leaf),
        "max_features": p.max_features,
        "master_seed": int(p.master_seed),
    }


def _tree_to_dict(node: TreeNode) -> dict:
    out = {"proba": float(node.predicted_proba), "n": int(node.n_samples)}
    if not node.is_leaf:
        out["feature_index"] = int(node.feature_index)
        out["threshold"] = float(node.threshold)
        out["left"] = _tree_to_dict(node.left)
        out["right"] = _tree_to_dict(node.right)
    return out


def _tree_from_dict(d: dict) -> TreeNode:
    node = TreeNode(float(d["proba"]), int(d["n"]))
    if "feature_index" in d:
        node.feature_index = int(d["feature_index"])
        node.threshold = float(d["threshold"])
        node.left = _tree_from_dict(d["left"])
        node.right = _tree_from_dict(d["right"])
    return node


def model_to_document(model) -> dict:
    if isinstance(model, ScmModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "scm",
            "feature_names": model.feature_names,
            "master_seed": None,
            "payload": _scm_to_dict(model),
        }
    if isinstance(model, RandomScmModel):
        p = len(model.feature_names)
        estimators = []
        for e in model.estimators:
            subset = "all" if e.feature_subset == list(range(p)) else list(e.feature_subset)
            estimators.append({
                "bootstrap_seed": int(e.bootstrap_seed),
                "p_used": float(e.p_used),
                "feature_subset": subset,
                "model": _scm_to_dict(e.model),
            })
        return {
            "format_version": FORMAT_VERSION,
            "kind": "randomscm",
            "feature_names": list(model.feature_names),
            "master_seed": int(model.params.master_seed),
            "payload": {
                "params": _rscm_params_to_dict(model.params),
                "vote_threshold": float(model.vote_threshold),
                "estimators": estimators,
            },
        }
    if isinstance(model, DecisionTreeModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "tree",
            "feature_names": list(model.feature_names),
            "master_seed": None,
            "payload": {"params": _forest_params_to_dict(model.params), "root": _tree_to_dict(model.root)},
        }
    if isinstance(model, ForestModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "forest",
            "feature_names": list(model.feature_names),
            "master_seed": int(model.params.master_seed),
            "payload": {
                "params": _forest_params_to_dict(model.params),
                "bootstrap_seeds": [int(s) for s in model.bootstrap_seeds],
                "trees": [_tree_to_dict(t) for t in model.trees],
            },
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_document(doc: dict):
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format_version {version!r} (expected {FORMAT_VERSION})")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ModelError(f"unknown model kind {kind!r}")
    try:
        payload = doc["payload"]
        names = doc.get("feature_names")
        if kind == "scm":
            model = _scm_from_dict(payload)
            model.feature_names = names
            return model
        if kind == "randomscm":
            p = len(names)
            estimators = [
                Estimator(
                    _scm_from_dict(e["model"]),
                    list(range(p)) if e["feature_subset"] == "all" else [int(j) for j in e["feature_subset"]],
                    int(e["bootstrap_seed"]),
                    float(e["p_used"]),
                )
                for e in payload["estimators"]
            ]
            return RandomScmModel(
                estimators, RandomScmParams(**payload["params"]), list(names), float(payload["vote_threshold"])
            )
        if kind == "tree":
            return DecisionTreeModel(_tree_from_dict(payload["root"]), ForestParams(**payload["params"]), list(names))
        return ForestModel(
            [_tree_from_dict(t) for t in payload["trees"]],
            [int(s) for s in payload["bootstrap_seeds"]],
            ForestParams(**payload["params"]),
            list(names),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed {kind} model document: {exc}") from exc


def dumps_model(model) -> str:
    return json.dumps(model_to_document(model), indent=1) + "\n"


def save_model(model, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelError(f"no such model file: {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelError(f"{path} is not a valid JSON model file: {exc}") from None
    return model_from_document(doc)


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _write_rows(path, header, rows, delimiter="\t"):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_cv_folds(reports, path) -> None:
    rows = []
    for r in reports:
        params = json.dumps(r.params, sort_keys=True, default=str)
        for f in r.folds:
            for split in ("train", "test"):
                ms = getattr(f, split)
                rows.append([r.learner, params, f.fold, split, *(ms.get(m) for m in METRICS)])
    _write_rows(path, ["learner", "params", "fold", "split", *METRICS], rows)


def summary_rows(reports) -> list:
    rows = []
    for r in reports:
        params = json.dumps(r.params, sort_keys=True, default=str)
        for m in METRICS:
            rows.append([
                r.learner, params, m,
                r.mean("train", m), r.std("train", m),
                r.mean("test", m), r.std("test", m),
                r.gap(m),
            ])
    return rows


def write_cv_summary(reports, path) -> None:
    _write_rows(
        path,
        ["learner", "params", "metric", "train_mean", "train_std", "test_mean", "test_std", "gap"],
        summary_rows(reports),
    )


def write_projection(table, path) -> None:
    rows = [[sid, *(float(v) for v in vals), int(lab)]
            for sid, vals, lab in zip(table.sample_ids, table.values, table.labels)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(table.header())
        for row in rows:
            w.writerow([row[0], *(repr(v) for v in row[1:-1]), row[-1]])


def write_thresholds(rules, path) -> None:
    _write_rows(path, ["feature", "threshold", "direction"],
                [[r.feature_name, repr(float(r.threshold)), r.direction.value] for r in rules])


def write_predictions(sample_ids, predictions, probas, path) -> None:
    rows = [[sid, int(p), float(q)] for sid, p, q in zip(sample_ids, predictions, probas)]
    _write_rows(path, ["sample_id", "prediction", "proba"], rows, delimiter=",")
