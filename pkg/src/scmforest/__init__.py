"""Sparse rule learning for fat data: SCM, RandomSCM, tree baselines and an evaluation harness."""
from .baselines import DecisionTreeModel, ForestModel, ForestParams, fit_forest, fit_tree
from .dataset import Dataset, LabelMapping, apply_log_transform, load_csv, write_csv
from .ensemble import RandomScmModel, RandomScmParams, fit_ensemble
from .errors import DataError, ModelError, ScmForestError
from .evaluation import LearnerSpec, MetricSet, compute_metrics, cross_validate, grid_search
from .interpretation import feature_importance, pattern_counts, project, separation_score
from .io import load_model, save_model
from .kernels import BACKEND
from .rules import Direction, RuleSpace, ThresholdRule, enumerate_rules, evaluate_rule
from .scm import ModelType, ScmModel, ScmParams, fit, predict

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DataError", "Dataset", "DecisionTreeModel", "Direction", "ForestModel",
    "ForestParams", "LabelMapping", "LearnerSpec", "MetricSet", "ModelError", "ModelType",
    "RandomScmModel", "RandomScmParams", "RuleSpace", "ScmForestError", "ScmModel", "ScmParams",
    "ThresholdRule", "apply_log_transform", "compute_metrics", "cross_validate", "enumerate_rules",
    "evaluate_rule", "feature_importance", "fit", "fit_ensemble", "fit_forest", "fit_tree",
    "grid_search", "load_csv", "load_model", "pattern_counts", "predict", "project", "save_model",
    "separation_score", "write_csv",
]
