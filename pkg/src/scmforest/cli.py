"""Command-line interface: ``scmforest <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .baselines import DecisionTreeModel, ForestModel, ForestParams, fit_forest, fit_tree
from .dataset import apply_log_transform, load_csv, read_feature_table, write_csv
from .ensemble import RandomScmModel, RandomScmParams, default_workers, fit_ensemble
from .errors import DataError, ModelError, ScmForestError
from .evaluation import METRICS, LearnerSpec, cross_validate, default_grids, grid_search
from .interpretation import feature_importance, pattern_counts, project, separation_score
from .scm import ScmModel, ScmParams, fit
from .synth import make_planted

DEFAULT_SEED = 42
ABSENT_BASELINES = ("plsda", "svm")


class UsageError(ScmForestError):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_data_args(p, label_required=True):
    p.add_argument("--data", required=True, help="CSV file, one row per sample")
    p.add_argument("--label-col", required=label_required, default=None)
    p.add_argument("--positive-class", default=None, help="raw label value mapped to 1")
    p.add_argument("--id-col", default=None)
    p.add_argument("--impute", choices=["median"], default=None,
                   help="fill missing cells with the per-feature median (default: error)")
    p.add_argument("--log-offset", type=float, default=None, help="apply ln(x + offset) to every feature")


def _add_seed_workers(p):
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel training workers (default: $SCMFOREST_WORKERS or 1)")


def _add_model_args(p):
    p.add_argument("--model", choices=["scm", "randomscm", "tree", "forest"], default="randomscm")
    g = p.add_argument_group("scm / randomscm")
    g.add_argument("--model-type", default=None,
                   help="CONJUNCTION or DISJUNCTION (randomscm also accepts ALTERNATE)")
    g.add_argument("--p", dest="p_penalty", type=float, default=None, help="scm penalty on sacrificed positives")
    g.add_argument("--max-rules", type=int, default=None)
    g.add_argument("--n-estimators", type=int, default=None)
    g.add_argument("--p-options", type=_float_list, default=None, help="randomscm penalty choices, e.g. 0.1,1,10")
    g.add_argument("--max-features", default=None, help="ALL, SQRT, LOG2 or a fraction in (0,1]")
    g = p.add_argument_group("tree / forest")
    g.add_argument("--n-trees", type=int, default=None)
    g.add_argument("--max-depth", type=int, default=None)
    g.add_argument("--min-samples-leaf", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scmforest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("synth", help="write a synthetic planted-conjunction dataset")
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--p", type=int, default=5000)
    p.add_argument("--rules", type=int, default=3, help="number of planted stumps")
    p.add_argument("--noise", type=float, default=0.1, help="fraction of flipped labels")
    p.add_argument("--fail-rate", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", default=None, help="TSV listing the planted rules")

    p = sub.add_parser("train", help="fit a model and write it as JSON")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_workers(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="write sample_id,prediction,proba for a dataset")
    p.add_argument("--model-file", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default=None, help="column to ignore if present")
    p.add_argument("--id-col", default=None)
    p.add_argument("--log-offset", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cv", help="stratified k-fold cross-validation of one learner")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_workers(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out-prefix", required=True, help="writes <prefix>.folds.tsv and <prefix>.summary.tsv")

    p = sub.add_parser("inspect", help="print rules, feature frequencies and frequent conjunctions")
    p.add_argument("--model-file", required=True)
    p.add_argument("--top", type=int, default=10)

    p = sub.add_parser("project", help="project a dataset on a frequent conjunction of features")
    _add_data_args(p)
    p.add_argument("--model-file", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--thresholds-out", default=None, help="default: <out>.thresholds.tsv")

    p = sub.add_parser("benchmark", help="grid-searched CV of scm, randomscm, tree and forest")
    _add_data_args(p)
    _add_seed_workers(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out-prefix", default=None)
    return parser


def _seed(args) -> int:
    if args.seed is None:
        print(f"seed: {DEFAULT_SEED} (default)", file=sys.stderr)
        return DEFAULT_SEED
    return args.seed


def _load(args):
    d = load_csv(args.data, args.label_col, args.positive_class, args.id_col, args.impute)
    if args.log_offset is not None:
        d = apply_log_transform(d, args.log_offset)
    return d


def _learner(args, seed) -> LearnerSpec:
    params = {}
    if args.model in ("scm", "randomscm"):
        if args.model_type is not None:
            key = "model_type" if args.model == "scm" else "model_type_policy"
            params[key] = args.model_type.upper()
        if args.max_rules is not None:
            params["max_rules"] = args.max_rules
    if args.model == "scm" and args.p_penalty is not None:
        params["p_penalty"] = args.p_penalty
    if args.model == "randomscm":
        if args.n_estimators is not None:
            params["n_estimators"] = args.n_estimators
        if args.p_options is not None:
            params["p_options"] = tuple(args.p_options)
        if args.max_features is not None:
            params["max_features"] = args.max_features
    if args.model in ("tree", "forest"):
        if args.max_depth is not None:
            params["max_depth"] = args.max_depth
        if args.min_samples_leaf is not None:
            params["min_samples_leaf"] = args.min_samples_leaf
    if args.model == "forest":
        if args.n_trees is not None:
            params["n_trees"] = args.n_trees
        if args.max_features is not None:
            params["max_features"] = args.max_features
    return LearnerSpec(args.model, params)


def _train(spec: LearnerSpec, d, seed, workers):
    if spec.name == "scm":
        return fit(d, ScmParams(**spec.params))
    if spec.name == "randomscm":
        return fit_ensemble(d, RandomScmParams(**{**spec.params, "master_seed": seed}), workers)
    if spec.name == "forest":
        return fit_forest(d, ForestParams(**{**spec.params, "master_seed": seed}), workers)
    params = ForestParams(**spec.params)
    return DecisionTreeModel(fit_tree(d, params, False, seed), params, list(d.feature_names))


def _print_importances(m: RandomScmModel, top: int):
    print(f"feature frequency (top {top}):")
    for name, freq in list(feature_importance(m).items())[:top]:
        print(f"  {freq:6.3f}  {name}")


def cmd_synth(args):
    seed = _seed(args)
    d, truth = make_planted(args.n, args.p, args.rules, args.noise, seed, args.fail_rate)
    write_csv(d, args.out)
    print(f"wrote {args.out}: n={d.n_samples} p={d.n_features}, "
          f"planted {' AND '.join(str(r) for r in truth.rules)}")
    if args.truth_out:
        io.write_thresholds(truth.rules, args.truth_out)


def cmd_train(args):
    seed = _seed(args)
    d = _load(args)
    spec = _learner(args, seed)
    model = _train(spec, d, seed, args.workers)
    io.save_model(model, args.out)
    if isinstance(model, ScmModel):
        print(f"SCM ({model.model_type.value.lower()}, {len(model.rules)} rules, "
              f"stop: {model.training_meta['stop_reason']}):")
        for r in model.rules:
            print(f"  {r}")
    elif isinstance(model, RandomScmModel):
        print(f"RandomSCM: {len(model.estimators)} estimators")
        _print_importances(model, 10)
    elif isinstance(model, ForestModel):
        print(f"forest: {len(model.trees)} trees, mean depth "
              f"{np.mean([t.depth() for t in model.trees]):.1f}")
    else:
        print(f"tree: depth {model.root.depth()}, {model.root.n_leaves()} leaves")
    print(f"model written to {args.out}")


def _aligned_matrix(model, names, X):
    wanted = model.feature_names
    if wanted is None:
        raise ModelError("model file carries no feature names")
    pos = {n: j for j, n in enumerate(names)}
    missing = [n for n in wanted if n not in pos]
    if missing:
        raise ModelError(f"dataset lacks {len(missing)} model feature(s), e.g. {missing[0]!r}")
    return X[:, [pos[n] for n in wanted]]


def cmd_predict(args):
    model = io.load_model(args.model_file)
    exclude = [args.label_col] if args.label_col else []
    ids, names, X = read_feature_table(args.data, args.id_col, exclude)
    if args.log_offset is not None:
        if (X < 0).any():
            raise DataError("log transform needs non-negative feature values")
        X = np.log(X + args.log_offset)
    X = _aligned_matrix(model, names, X)
    pred = model.predict(X)
    proba = model.predict_proba(X) if hasattr(model, "predict_proba") else pred.astype(float)
    io.write_predictions(ids, pred, proba, args.out)
    print(f"wrote {len(ids)} predictions to {args.out}")


def _print_summary(reports):
    head = f"{'learner':<10} {'metric':<18} {'train':>8} {'test':>8} {'gap':>8}"
    print(head)
    for r in reports:
        for m in METRICS:
            vals = [r.mean("train", m), r.mean("test", m), r.gap(m)]
            cells = ["NA" if v is None else f"{v:.3f}" for v in vals]
            print(f"{r.learner:<10} {m:<18} {cells[0]:>8} {cells[1]:>8} {cells[2]:>8}")


def cmd_cv(args):
    seed = _seed(args)
    d = _load(args)
    report = cross_validate(d, _learner(args, seed), args.folds, seed, args.workers)
    io.write_cv_folds([report], f"{args.out_prefix}.folds.tsv")
    io.write_cv_summary([report], f"{args.out_prefix}.summary.tsv")
    _print_summary([report])


def cmd_inspect(args):
    model = io.load_model(args.model_file)
    if isinstance(model, ScmModel):
        print(f"SCM {model.model_type.value.lower()} of {len(model.rules)} rules "
              f"(p={model.params.p_penalty}, max_rules={model.params.max_rules}):")
        for r in model.rules:
            print(f"  {r}")
        return
    if isinstance(model, RandomScmModel):
        print(f"RandomSCM: {len(model.estimators)} estimators, master seed {model.params.master_seed}")
        _print_importances(model, args.top)
        for k in (1, 2, 3):
            patterns = pattern_counts(model, k)
            print(f"most frequent conjunctions of size {k}:")
            if not patterns:
                print("  (none)")
            for pat in patterns[: args.top]:
                rules = " AND ".join(str(r) for r in pat.representative_rules)
                print(f"  {pat.frequency:6.3f}  {rules}")
        return
    if isinstance(model, ForestModel):
        depths = [t.depth() for t in model.trees]
        print(f"forest: {len(model.trees)} trees, depth {min(depths)}-{max(depths)}")
        return
    print(f"tree: depth {model.root.depth()}, {model.root.n_leaves()} leaves")


def cmd_project(args):
    model = io.load_model(args.model_file)
    if not isinstance(model, RandomScmModel):
        raise ModelError("project needs a randomscm model")
    d = _load(args)
    table = project(model, d, args.k, args.rank)
    io.write_projection(table, args.out)
    side = args.thresholds_out or f"{args.out}.thresholds.tsv"
    io.write_thresholds(table.rules, side)
    score = separation_score(table)
    print(f"pattern: {' AND '.join(str(r) for r in table.rules)}")
    print(f"separation (balanced accuracy): {'NA' if score is None else f'{score:.3f}'}")
    print(f"wrote {args.out} and {side}")


def cmd_benchmark(args):
    seed = _seed(args)
    d = _load(args)
    grids = default_grids()
    best_reports = []
    all_reports = []
    for name, grid in grids.items():
        _, best, reports = grid_search(d, name, grid, args.folds, "balanced_accuracy", seed, args.workers)
        best_reports.append(best)
        all_reports.extend(reports)
    cols = ["accuracy", "balanced_accuracy", "auc"]
    print(f"{'learner':<10} " + " ".join(f"{c:>18}" for c in cols) + f" {'gap(acc)':>9}  params")
    for r in best_reports:
        cells = []
        for c in cols:
            v, s = r.mean("test", c), r.std("test", c)
            cells.append("NA" if v is None else f"{v:.3f} +/- {s:.3f}")
        print(f"{r.learner:<10} " + " ".join(f"{c:>18}" for c in cells)
              + f" {r.gap('accuracy'):>9.3f}  {json.dumps(r.params, default=str)}")
    for name in ABSENT_BASELINES:
        print(f"{name:<10} " + " ".join(f"{'not implemented':>18}" for _ in cols))
    if args.out_prefix:
        io.write_cv_summary(best_reports, f"{args.out_prefix}.summary.tsv")
        io.write_cv_folds(all_reports, f"{args.out_prefix}.folds.tsv")


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "inspect": cmd_inspect,
    "project": cmd_project,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        COMMANDS[args.command](args)
    except ScmForestError as exc:
        print(f"scmforest {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        print(f"scmforest {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"scmforest {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
