"""In-memory data model and CSV ingestion."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DataError

MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none", "n/a"})


@dataclass(frozen=True)
class LabelMapping:
    positive_class: str
    negative_class: str

    def __post_init__(self):
        if self.positive_class == self.negative_class:
            raise DataError("positive and negative class must differ")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense n x p feature matrix with binary labels (1 = positive/case).

    Arrays are made read-only on construction so a Dataset can be shared
    between threads and worker processes without copying.
    """

    features: np.ndarray
    labels: np.ndarray
    sample_ids: tuple
    feature_names: tuple
    label_mapping: Optional[LabelMapping] = field(default=None)

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64, copy=True)
        y = np.array(self.labels, dtype=np.int8, copy=True)
        if X.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        n, p = X.shape
        if n < 2 or p < 1:
            raise DataError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if y.shape != (n,):
            raise DataError("labels length does not match feature rows")
        if not np.all((y == 0) | (y == 1)):
            raise DataError("labels must be 0/1")
        if y.min() == y.max():
            raise DataError("both classes must be present")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or infinite values")
        ids = tuple(str(s) for s in self.sample_ids)
        names = tuple(str(s) for s in self.feature_names)
        if len(ids) != n:
            raise DataError("sample_ids length does not match feature rows")
        if len(names) != p:
            raise DataError("feature_names length does not match feature columns")
        if len(set(ids)) != n:
            raise DataError("sample_ids must be unique")
        if len(set(names)) != p:
            raise DataError("feature_names must be unique")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "sample_ids", ids)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.sample_ids == other.sample_ids
            and self.feature_names == other.feature_names
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.features, other.features)
        )

    __hash__ = None

    def replace(self, **changes) -> "Dataset":
        kwargs = dict(
            features=self.features,
            labels=self.labels,
            sample_ids=self.sample_ids,
            feature_names=self.feature_names,
            label_mapping=self.label_mapping,
        )
        kwargs.update(changes)
        return Dataset(**kwargs)

    def subset(self, rows: Sequence[int]) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return self.replace(
            features=self.features[rows],
            labels=self.labels[rows],
            sample_ids=[self.sample_ids[i] for i in rows],
        )

    def flip_labels(self) -> "Dataset":
        mapping = self.label_mapping
        if mapping is not None:
            mapping = LabelMapping(mapping.negative_class, mapping.positive_class)
        return self.replace(labels=1 - self.labels, label_mapping=mapping)

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise DataError(f"unknown feature {name!r}") from None


def _parse_cell(cell: str, row: int, col: str) -> float:
    token = cell.strip()
    if token.lower() in MISSING_TOKENS:
        return math.nan
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"non-numeric value {cell!r} in column {col!r}, row {row}") from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {cell!r} in column {col!r}, row {row}")
    return value


def _map_labels(raw: list, positive_class: Optional[str]):
    distinct = sorted(set(raw))
    if positive_class is not None:
        if positive_class not in distinct:
            raise DataError(f"positive class {positive_class!r} not found among labels")
        if len(distinct) < 2:
            raise DataError("need at least 2 distinct label values")
        others = [v for v in distinct if v != positive_class]
        mapping = LabelMapping(positive_class, "|".join(others))
    else:
        if len(distinct) < 2:
            raise DataError("need at least 2 distinct label values")
        if len(distinct) > 2:
            raise DataError(
                f"{len(distinct)} distinct label values; pass a positive class to binarize"
            )
        # covers the "0"/"1" case as well: "1" > "0"
        mapping = LabelMapping(distinct[1], distinct[0])
    labels = np.array([1 if v == mapping.positive_class else 0 for v in raw], dtype=np.int8)
    return labels, mapping


def load_csv(
    path,
    label_column: str,
    positive_class: Optional[str] = None,
    id_column: Optional[str] = None,
    impute: Optional[str] = None,
) -> Dataset:
    """Read a comma-separated table into a :class:`Dataset`.

    Every column other than the label and id columns is a feature, in header
    order. Missing cells raise :class:`DataError` unless ``impute="median"``,
    which fills them with the per-feature median of the observed values.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    if impute not in (None, "median"):
        raise DataError(f"unknown imputation strategy {impute!r}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        rows = [r for r in reader if r]

    if any(h == "" for h in header):
        raise DataError("empty column name in header")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"duplicate column names: {', '.join(dupes)}")
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header")
    if id_column is not None and id_column not in header:
        raise DataError(f"id column {id_column!r} not in header")

    label_pos = header.index(label_column)
    id_pos = header.index(id_column) if id_column is not None else None
    feat_pos = [i for i in range(len(header)) if i not in (label_pos, id_pos)]
    if not feat_pos:
        raise DataError("no feature columns")

    raw_labels, ids = [], []
    X = np.empty((len(rows), len(feat_pos)), dtype=np.float64)
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"row {r + 1} has {len(row)} fields, expected {len(header)}")
        raw_labels.append(row[label_pos].strip())
        if id_pos is not None:
            ids.append(row[id_pos].strip())
        for j, c in enumerate(feat_pos):
            X[r, j] = _parse_cell(row[c], r + 1, header[c])

    missing = np.isnan(X)
    if missing.any():
        if impute is None:
            r, j = np.argwhere(missing)[0]
            raise DataError(
                f"missing value in column {header[feat_pos[j]]!r}, row {r + 1} "
                "(use median imputation to fill)"
            )
        for j in np.flatnonzero(missing.any(axis=0)):
            observed = X[~missing[:, j], j]
            if observed.size == 0:
                raise DataError(f"column {header[feat_pos[j]]!r} has no observed values")
            X[missing[:, j], j] = np.median(observed)

    if any(v == "" for v in raw_labels):
        raise DataError("missing label value")
    labels, mapping = _map_labels(raw_labels, positive_class)
    if id_pos is None:
        ids = [f"row_{i + 1:04d}" for i in range(len(rows))]
    return Dataset(
        features=X,
        labels=labels,
        sample_ids=ids,
        feature_names=[header[c] for c in feat_pos],
        label_mapping=mapping,
    )


def read_feature_table(path, id_column: Optional[str] = None, exclude: Sequence[str] = ()):
    """Read ``(sample_ids, feature_names, X)`` from a CSV without requiring labels."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        rows = [r for r in reader if r]
    if len(set(header)) != len(header):
        raise DataError("duplicate column names")
    if id_column is not None and id_column not in header:
        raise DataError(f"id column {id_column!r} not in header")
    skip = set(exclude) | ({id_column} if id_column else set())
    feat_pos = [i for i, h in enumerate(header) if h not in skip]
    X = np.empty((len(rows), len(feat_pos)))
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"row {r + 1} has {len(row)} fields, expected {len(header)}")
        for j, c in enumerate(feat_pos):
            X[r, j] = _parse_cell(row[c], r + 1, header[c])
    if np.isnan(X).any():
        raise DataError("missing feature values in prediction data")
    if id_column is not None:
        ids = [row[header.index(id_column)].strip() for row in rows]
    else:
        ids = [f"row_{i + 1:04d}" for i in range(len(rows))]
    return ids, [header[c] for c in feat_pos], X


def write_csv(d: Dataset, path, label_column: str = "label", id_column: str = "sample_id") -> None:
    """Write ``d`` so that :func:`load_csv` with the same column names restores it."""
    mapping = d.label_mapping
    if mapping is not None and "|" in mapping.negative_class:
        mapping = None  # one-vs-rest mapping cannot be restored from raw labels
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([id_column, label_column, *d.feature_names])
        for sid, y, row in zip(d.sample_ids, d.labels, d.features):
            if mapping is None:
                lab = str(int(y))
            else:
                lab = mapping.positive_class if y == 1 else mapping.negative_class
            w.writerow([sid, lab, *(repr(float(v)) for v in row)])


def apply_log_transform(d: Dataset, offset: float = 1.0) -> Dataset:
    """Replace every feature value x by ln(x + offset)."""
    if not offset > 0:
        raise DataError("log offset must be positive")
    if (d.features < 0).any():
        raise DataError("log transform needs non-negative feature values")
    return d.replace(features=np.log(d.features + offset))
