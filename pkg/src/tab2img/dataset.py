"""Typed tabular datasets: CSV ingestion, normalization, undersampling, splits.

Feature kinds are Numerical, Binary (exactly two observed values) and
Categorical (three or more levels). Kinds are inferred from the data unless a
schema pins them. All downstream stages consume the normalized form, in which
every feature lives in [0, 1].
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .seeding import substream

NUMERICAL = "numerical"
BINARY = "binary"
CATEGORICAL = "categorical"

MISSING_TOKENS = ("", "?")


class DatasetError(ValueError):
    """Raised for ingestion, schema, normalization or resampling failures."""


@dataclass(frozen=True)
class FeatureKind:
    kind: str
    levels: tuple = ()

    def is_numerical(self) -> bool:
        return self.kind == NUMERICAL


@dataclass(frozen=True)
class TypedDataset:
    """Immutable column-major dataset.

    columns[i] is a float64 array for numerical features and an object array
    of strings for binary/categorical ones (float64 after normalization).
    """

    name: str
    label_name: str
    feature_names: tuple
    kinds: tuple
    columns: tuple
    labels: np.ndarray
    classes: tuple
    missing_mask: np.ndarray

    @property
    def n_samples(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_counts(self) -> dict:
        return {c: int(np.sum(self.labels == c)) for c in self.classes}

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise DatasetError(f"unknown feature {name!r}") from None

    def take(self, indices) -> "TypedDataset":
        idx = np.asarray(indices, dtype=int)
        return replace(
            self,
            columns=tuple(col[idx] for col in self.columns),
            labels=self.labels[idx],
            missing_mask=self.missing_mask[idx],
        )


def _parse_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def _infer_kind(name: str, values: list, n_rows: int) -> FeatureKind:
    distinct = sorted(set(values))
    if len(distinct) == 1:
        if _parse_float(distinct[0]) is None:
            raise DatasetError(f"column {name!r} is constant and non-numeric")
        return FeatureKind(NUMERICAL)
    if len(distinct) == 2:
        return FeatureKind(BINARY, _binary_levels(distinct))
    floats = [_parse_float(v) for v in distinct]
    if any(f is None for f in floats):
        return FeatureKind(CATEGORICAL, tuple(distinct))
    if all(float(f).is_integer() for f in floats) and len(distinct) <= max(10, 0.05 * n_rows):
        return FeatureKind(CATEGORICAL, tuple(distinct))
    return FeatureKind(NUMERICAL)


def _binary_levels(distinct) -> tuple:
    # observed low value maps to 0, high to 1: numeric order when both parse,
    # lexicographic otherwise
    a, b = sorted(distinct)
    fa, fb = _parse_float(a), _parse_float(b)
    if fa is not None and fb is not None and fa > fb:
        a, b = b, a
    return (a, b)


def _kind_from_schema(name: str, declared: str, values: list) -> FeatureKind:
    distinct = sorted(set(values))
    if declared == NUMERICAL:
        bad = [v for v in distinct if _parse_float(v) is None]
        if bad:
            raise DatasetError(f"column {name!r} declared numerical but holds {bad[0]!r}")
        return FeatureKind(NUMERICAL)
    if declared == BINARY:
        if len(distinct) != 2:
            raise DatasetError(
                f"column {name!r} declared binary but has {len(distinct)} distinct value(s)"
            )
        return FeatureKind(BINARY, _binary_levels(distinct))
    if declared == CATEGORICAL:
        if len(distinct) < 3:
            raise DatasetError(
                f"column {name!r} declared categorical but has only {len(distinct)} level(s)"
            )
        return FeatureKind(CATEGORICAL, tuple(distinct))
    raise DatasetError(f"unknown kind {declared!r} for column {name!r}")


def ingest(path, label_column: str, schema: dict | None = None, name: str | None = None) -> TypedDataset:
    """Read a UTF-8 CSV with a header row into a TypedDataset.

    Missing cells ("" or "?") are imputed per feature: median for numerical
    columns, mode (ties broken lexicographically) for binary and categorical.

    Args:
        path: CSV path.
        label_column: header name of the class column.
        schema: optional {feature name: kind} overriding inference.
        name: dataset name; defaults to the file stem.
    """
    path = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise DatasetError(f"{path}: no column named {label_column!r}")
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: header but no data rows")
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise DatasetError(f"{path}: row {i + 2} has {len(row)} cells, expected {width}")

    label_idx = header.index(label_column)
    cells = [[row[j].strip() for row in body] for j in range(width)]
    labels = cells[label_idx]
    if any(v in MISSING_TOKENS for v in labels):
        raise DatasetError(f"{path}: missing value in label column {label_column!r}")

    feature_names, kinds, columns, mask_cols = [], [], [], []
    for j, col_name in enumerate(header):
        if j == label_idx:
            continue
        raw = cells[j]
        missing = np.array([v in MISSING_TOKENS for v in raw], dtype=bool)
        observed = [v for v, m in zip(raw, missing) if not m]
        if not observed:
            raise DatasetError(f"{path}: column {col_name!r} has no observed values")
        if schema and col_name in schema:
            kind = _kind_from_schema(col_name, schema[col_name], observed)
        else:
            kind = _infer_kind(col_name, observed, len(raw))
        columns.append(_impute(kind, raw, missing))
        feature_names.append(col_name)
        kinds.append(kind)
        mask_cols.append(missing)

    stem = name if name is not None else _stem(path)
    classes = tuple(sorted(set(labels)))
    return TypedDataset(
        name=stem,
        label_name=label_column,
        feature_names=tuple(feature_names),
        kinds=tuple(kinds),
        columns=tuple(columns),
        labels=np.array(labels, dtype=object),
        classes=classes,
        missing_mask=np.column_stack(mask_cols),
    )


def _stem(path: str) -> str:
    base = path.replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def _impute(kind: FeatureKind, raw: list, missing: np.ndarray):
    if kind.kind == NUMERICAL:
        vals = np.array([_parse_or_raise(v) for v, m in zip(raw, missing) if not m])
        fill = float(np.median(vals))
        out = np.empty(len(raw), dtype=np.float64)
        for i, (v, m) in enumerate(zip(raw, missing)):
            out[i] = fill if m else _parse_or_raise(v)
        return out
    counts: dict = {}
    for v, m in zip(raw, missing):
        if not m:
            counts[v] = counts.get(v, 0) + 1
    fill = min(counts, key=lambda v: (-counts[v], v))
    return np.array([fill if m else v for v, m in zip(raw, missing)], dtype=object)


def _parse_or_raise(text: str) -> float:
    value = _parse_float(text)
    if value is None:
        raise DatasetError(f"cannot parse {text!r} as a number")
    return value


@dataclass(frozen=True)
class NormalizationSpec:
    """Fitted per-feature transforms: (min, max) ranges and level->code tables."""

    numeric: dict = field(default_factory=dict)
    codes: dict = field(default_factory=dict)


def normalize(ds: TypedDataset, fit_indices=None) -> tuple[TypedDataset, NormalizationSpec]:
    """Map every feature into [0, 1]; returns the dataset and the fitted spec.

    Numerical features are min-max scaled on the fit rows (constant -> 0.5) and
    clipped so rows outside the fit range stay in [0, 1]. Categorical levels
    get equally spaced codes in descending fit-row frequency order, ties broken
    lexicographically. Binary maps the observed low value to 0, high to 1.

    fit_indices restricts fitting (not application) to the given rows; used to
    keep test rows out of the fitted spec when splits are in play.
    """
    fit = np.arange(ds.n_samples) if fit_indices is None else np.asarray(fit_indices, dtype=int)
    if fit.size == 0:
        raise DatasetError("normalize: empty fit index set")
    numeric: dict = {}
    codes: dict = {}
    new_columns = []
    for name, kind, col in zip(ds.feature_names, ds.kinds, ds.columns):
        if kind.kind == NUMERICAL:
            lo = float(np.min(col[fit]))
            hi = float(np.max(col[fit]))
            numeric[name] = (lo, hi)
            if hi == lo:
                new_columns.append(np.full(len(col), 0.5))
            else:
                new_columns.append(np.clip((col.astype(np.float64) - lo) / (hi - lo), 0.0, 1.0))
        elif kind.kind == BINARY:
            low, high = _binary_levels(sorted(set(col.tolist())))
            table = {low: 0.0, high: 1.0}
            codes[name] = {str(k): v for k, v in table.items()}
            new_columns.append(np.array([table[v] for v in col], dtype=np.float64))
        else:
            new_columns.append(_code_categorical(name, col, fit, codes))
    out = replace(ds, columns=tuple(new_columns))
    return out, NormalizationSpec(numeric=numeric, codes=codes)


def _code_categorical(name: str, col: np.ndarray, fit: np.ndarray, codes: dict) -> np.ndarray:
    domain = sorted(set(col.tolist()), key=str)
    counts = {v: 0 for v in domain}
    for v in col[fit]:
        counts[v] += 1
    ordered = sorted(domain, key=lambda v: (-counts[v], str(v)))
    if len(ordered) == 1:
        table = {ordered[0]: 0.5}
    else:
        step = 1.0 / (len(ordered) - 1)
        table = {v: i * step for i, v in enumerate(ordered)}
    codes[name] = {str(k): v for k, v in table.items()}
    return np.array([table[v] for v in col], dtype=np.float64)


def undersample(ds: TypedDataset, seed: int) -> TypedDataset:
    """Downsample every class to the minority-class count, preserving row order."""
    counts = ds.class_counts()
    floor = min(counts.values())
    if floor < 1:
        raise DatasetError("undersample: a class has zero samples")
    rng = substream(seed, "undersample")
    keep: list = []
    for cls in ds.classes:
        idx = np.flatnonzero(ds.labels == cls)
        chosen = rng.choice(idx, size=floor, replace=False)
        keep.extend(int(i) for i in chosen)
    return ds.take(sorted(keep))


def split(ds: TypedDataset, train_fraction: float, repeats: int, seed: int) -> list:
    """Stratified train/test index pairs, one per repeat.

    Per class the train share is round(train_fraction * class size), clamped so
    both sides keep at least one sample.
    """
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction {train_fraction} outside (0, 1)")
    if repeats < 1:
        raise DatasetError("repeats must be >= 1")
    for cls, count in ds.class_counts().items():
        if count < 2:
            raise DatasetError(f"class {cls!r} has {count} sample(s), cannot stratify")
    out = []
    for r in range(repeats):
        rng = substream(seed, "split", r)
        train: list = []
        test: list = []
        for cls in ds.classes:
            idx = np.flatnonzero(ds.labels == cls)
            order = rng.permutation(len(idx))
            n_train = int(round(train_fraction * len(idx)))
            n_train = min(max(n_train, 1), len(idx) - 1)
            shuffled = idx[order]
            train.extend(int(i) for i in shuffled[:n_train])
            test.extend(int(i) for i in shuffled[n_train:])
        out.append((sorted(train), sorted(test)))
    return out


def write_normalized_csv(ds: TypedDataset, path) -> None:
    """Audit export of a normalized dataset: feature columns plus the label."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [ds.label_name])
        for i in range(ds.n_samples):
            row = [repr(float(col[i])) for col in ds.columns]
            writer.writerow(row + [str(ds.labels[i])])
