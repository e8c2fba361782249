"""Dataset loading, encoding, normalization and resampling.

Datasets are immutable after construction: every operation here returns a new
:class:`Dataset` and is a pure function of its inputs plus explicit seeds, so
datasets and splits can be shared freely across concurrent tasks.

Supported on-disk formats:

* ARFF subset: ``@relation``, ``@attribute <name> numeric|{v1,...}``, ``@data``
  with comma-separated rows, ``%`` comments; keywords are case-insensitive.
  The last attribute is the class and must be nominal.
* CSV: first row is a header, the last column is the class, ``?`` marks a
  missing value. Column types are inferred (numeric if every non-missing cell
  parses as a float).

The dataset identity used for seeding and result keys is the file stem.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from clfbench.seeding import derive_seed, rng_from

MISSING = "?"


class DatasetError(ValueError):
    """Raised for malformed dataset files or invalid split requests."""


@dataclass(frozen=True)
class FeatureSpec:
    """One input attribute: numeric, or nominal with an ordered value list."""

    name: str
    kind: str  # "numeric" | "nominal"
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "nominal"):
            raise DatasetError(f"unknown feature kind {self.kind!r}")
        if self.kind == "nominal":
            if not self.values:
                raise DatasetError(f"nominal feature {self.name!r} has an empty value list")
            if len(set(self.values)) != len(self.values):
                raise DatasetError(f"nominal feature {self.name!r} has duplicate values")


@dataclass(frozen=True)
class DatasetSchema:
    features: tuple[FeatureSpec, ...]
    class_values: tuple[str, ...]

    def __post_init__(self):
        if not self.features:
            raise DatasetError("schema needs at least one feature")
        if len(self.class_values) < 2:
            raise DatasetError("schema needs at least two class values")

    @property
    def num_attributes(self) -> int:
        return len(self.features)

    @property
    def num_classes(self) -> int:
        return len(self.class_values)

    @property
    def all_numeric(self) -> bool:
        return all(f.kind == "numeric" for f in self.features)


@dataclass(frozen=True)
class Dataset:
    """Column-typed instance table with integer class labels.

    ``X`` is float64 once all features are numeric (missing numeric cells are
    NaN until imputed by :func:`normalize_fit_apply`); with nominal features
    present it is an object array holding floats and value strings.
    """

    dataset_id: str
    schema: DatasetSchema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != self.schema.num_attributes:
            raise DatasetError(
                f"{self.dataset_id}: row arity {self.X.shape} does not match "
                f"{self.schema.num_attributes} declared attributes"
            )
        if len(self.y) != len(self.X):
            raise DatasetError(f"{self.dataset_id}: {len(self.X)} rows but {len(self.y)} labels")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= self.schema.num_classes):
            raise DatasetError(f"{self.dataset_id}: class index out of range")
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.schema.num_attributes

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.schema.num_classes)

    def subset(self, row_indices: np.ndarray, suffix: str = "") -> "Dataset":
        """New dataset restricted to the given rows (schema shared)."""
        idx = np.asarray(row_indices)
        return Dataset(self.dataset_id + suffix, self.schema, self.X[idx].copy(), self.y[idx].copy())


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    resample_id: int
    seed: int


@dataclass(frozen=True)
class NormStats:
    """Per-feature train statistics: imputation means and min/max ranges."""

    impute_means: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_dataset(path, format: str | None = None) -> Dataset:
    """Load an ARFF or CSV file into a :class:`Dataset`.

    ``format`` is "arff" or "csv"; when omitted it is taken from the file
    extension. Missing nominal cells are imputed with the column mode here;
    missing numeric cells stay NaN and are imputed with the training-split
    mean inside :func:`normalize_fit_apply`.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "arff":
        return _load_arff(path)
    if fmt == "csv":
        return _load_csv(path)
    raise DatasetError(f"unknown dataset format {fmt!r} for {path}")


def _strip_quotes(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in ("'", '"'):
        return token[1:-1]
    return token


def _load_arff(path: Path) -> Dataset:
    features: list[FeatureSpec] = []
    data_rows: list[list[str]] = []
    data_lines: list[int] = []
    in_data = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if not in_data and line.lower().startswith("@relation"):
                continue
            if not in_data and line.lower().startswith("@attribute"):
                rest = line[len("@attribute"):].strip()
                if rest.startswith(("'", '"')):
                    quote = rest[0]
                    end = rest.index(quote, 1)
                    name, type_part = rest[1:end], rest[end + 1:].strip()
                else:
                    split = rest.split(None, 1)
                    if len(split) != 2:
                        raise DatasetError(f"{path}:{lineno}: malformed @attribute line")
                    name, type_part = split
                if type_part.startswith("{"):
                    if not type_part.endswith("}"):
                        raise DatasetError(f"{path}:{lineno}: unterminated nominal value list")
                    values = tuple(_strip_quotes(v) for v in type_part[1:-1].split(","))
                    features.append(FeatureSpec(name, "nominal", values))
                elif type_part.lower() in ("numeric", "real", "integer"):
                    features.append(FeatureSpec(name, "numeric"))
                else:
                    raise DatasetError(
                        f"{path}:{lineno}: unsupported attribute type {type_part!r} "
                        "(only numeric and nominal are supported)"
                    )
                continue
            if line.lower().startswith("@data"):
                in_data = True
                continue
            if not in_data:
                raise DatasetError(f"{path}:{lineno}: unexpected line before @data")
            if line.startswith("{"):
                raise DatasetError(f"{path}:{lineno}: sparse ARFF rows are not supported")
            data_rows.append([_strip_quotes(tok) for tok in line.split(",")])
            data_lines.append(lineno)

    if len(features) < 2:
        raise DatasetError(f"{path}: need at least one feature attribute plus a class attribute")
    class_attr = features[-1]
    if class_attr.kind != "nominal":
        raise DatasetError(f"{path}: class attribute {class_attr.name!r} must be nominal")
    feature_specs = tuple(features[:-1])
    class_values = class_attr.values
    if not data_rows:
        raise DatasetError(f"{path}: no data rows")

    return _assemble(
        path.stem, feature_specs, class_values, data_rows, data_lines, str(path),
        class_lookup={v: i for i, v in enumerate(class_values)},
    )


def _load_csv(path: Path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [(i, line.rstrip("\n")) for i, line in enumerate(fh, start=1)]
    lines = [(i, ln) for i, ln in lines if ln.strip()]
    if not lines:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in lines[0][1].split(",")]
    if len(header) < 2:
        raise DatasetError(f"{path}: need at least one feature column plus the class column")
    n_cols = len(header)
    rows: list[list[str]] = []
    line_nos: list[int] = []
    for lineno, ln in lines[1:]:
        rows.append([tok.strip() for tok in ln.split(",")])
        line_nos.append(lineno)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    for lineno, row in zip(line_nos, rows):
        if len(row) != n_cols:
            raise DatasetError(
                f"{path}:{lineno}: row has {len(row)} values, expected {n_cols}"
            )

    # Infer column kinds from the data: numeric iff every non-missing cell parses.
    feature_specs = []
    for j, name in enumerate(header[:-1]):
        col = [r[j] for r in rows if r[j] != MISSING]
        if col and all(_is_float(v) for v in col):
            feature_specs.append(FeatureSpec(name, "numeric"))
        else:
            if not col:
                raise DatasetError(f"{path}: column {name!r} has no observed values")
            values = tuple(dict.fromkeys(col))  # first-appearance order
            feature_specs.append(FeatureSpec(name, "nominal", values))

    class_col = [r[-1] for r in rows]
    for lineno, v in zip(line_nos, class_col):
        if v == MISSING:
            raise DatasetError(f"{path}:{lineno}: missing class label")
    class_values = tuple(dict.fromkeys(class_col))
    if len(class_values) < 2:
        raise DatasetError(f"{path}: need at least two distinct class labels")

    return _assemble(
        path.stem, tuple(feature_specs), class_values, rows, line_nos, str(path),
        class_lookup={v: i for i, v in enumerate(class_values)},
    )


def _is_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _assemble(dataset_id, feature_specs, class_values, rows, line_nos, origin, class_lookup):
    n_feat = len(feature_specs)
    n = len(rows)
    all_numeric = all(f.kind == "numeric" for f in feature_specs)
    X = np.empty((n, n_feat), dtype=np.float64 if all_numeric else object)
    y = np.empty(n, dtype=np.int64)

    for i, (lineno, row) in enumerate(zip(line_nos, rows)):
        if len(row) != n_feat + 1:
            raise DatasetError(f"{origin}:{lineno}: row has {len(row)} values, expected {n_feat + 1}")
        label = row[-1]
        if label not in class_lookup:
            raise DatasetError(f"{origin}:{lineno}: unknown class label {label!r}")
        y[i] = class_lookup[label]
        for j, spec in enumerate(feature_specs):
            cell = row[j]
            if spec.kind == "numeric":
                if cell == MISSING:
                    X[i, j] = np.nan
                elif _is_float(cell):
                    X[i, j] = float(cell)
                else:
                    raise DatasetError(
                        f"{origin}:{lineno}: non-numeric value {cell!r} in numeric column {spec.name!r}"
                    )
            else:
                if cell != MISSING and cell not in spec.values:
                    raise DatasetError(
                        f"{origin}:{lineno}: value {cell!r} not in declared values of {spec.name!r}"
                    )
                X[i, j] = cell

    # Nominal missing cells: impute with the column mode now (ties broken by
    # declared value order). Numeric NaNs wait for the training-split mean.
    for j, spec in enumerate(feature_specs):
        if spec.kind != "nominal":
            continue
        col = X[:, j]
        observed = [v for v in col if v != MISSING]
        if not observed:
            raise DatasetError(f"{origin}: nominal column {spec.name!r} has no observed values")
        counts = {v: 0 for v in spec.values}
        for v in observed:
            counts[v] += 1
        mode = max(spec.values, key=lambda v: counts[v])  # max is stable: first of ties wins
        for i in range(n):
            if X[i, j] == MISSING:
                X[i, j] = mode

    schema = DatasetSchema(tuple(feature_specs), tuple(class_values))
    return Dataset(dataset_id, schema, X, y)


def from_arrays(dataset_id: str, X, y, class_values=None, feature_names=None) -> Dataset:
    """Build an all-numeric Dataset directly from arrays (for generators and tests)."""
    X = np.asarray(X, dtype=np.float64).copy()
    y = np.asarray(y, dtype=np.int64).copy()
    k = int(y.max()) + 1 if class_values is None else len(class_values)
    cls = tuple(class_values) if class_values is not None else tuple(f"c{i}" for i in range(k))
    names = list(feature_names) if feature_names is not None else [f"f{j}" for j in range(X.shape[1])]
    specs = tuple(FeatureSpec(nm, "numeric") for nm in names)
    return Dataset(dataset_id, DatasetSchema(specs, cls), X, y)


# ---------------------------------------------------------------------------
# Encoding and normalization
# ---------------------------------------------------------------------------


def encode_nominal_to_binary(d: Dataset) -> Dataset:
    """Replace nominal features with 0/1 indicators.

    A k-valued nominal feature (k > 2) becomes k indicator columns in declared
    value order; a binary nominal becomes a single indicator of its first
    declared value. Numeric features pass through unchanged, so an all-numeric
    dataset is returned as-is (same object).
    """
    if d.schema.all_numeric and d.X.dtype == np.float64:
        return d

    new_specs: list[FeatureSpec] = []
    cols: list[np.ndarray] = []
    for j, spec in enumerate(d.schema.features):
        if spec.kind == "numeric":
            new_specs.append(spec)
            cols.append(d.X[:, j].astype(np.float64))
        elif len(spec.values) <= 2:
            first = spec.values[0]
            new_specs.append(FeatureSpec(f"{spec.name}={first}", "numeric"))
            cols.append(np.array([1.0 if v == first else 0.0 for v in d.X[:, j]]))
        else:
            for value in spec.values:
                new_specs.append(FeatureSpec(f"{spec.name}={value}", "numeric"))
                cols.append(np.array([1.0 if v == value else 0.0 for v in d.X[:, j]]))
    X = np.column_stack(cols)
    schema = DatasetSchema(tuple(new_specs), d.schema.class_values)
    return Dataset(d.dataset_id, schema, X, d.y.copy())


def normalize_fit_apply(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset, NormStats]:
    """Min/max-normalize both splits using statistics fitted on train only.

    Missing numeric cells (NaN) are first imputed with the train-column mean.
    Each value then maps to (v - min) / (max - min) with min/max taken from
    the imputed train column; test values outside the train range are NOT
    clipped. A constant train feature maps every value (train and test) to 0.
    """
    if train.X.dtype != np.float64 or test.X.dtype != np.float64:
        raise DatasetError("normalize_fit_apply requires encoded (all-numeric) datasets")

    Xtr = train.X.astype(np.float64).copy()
    Xte = test.X.astype(np.float64).copy()

    with np.errstate(invalid="ignore"):
        means = np.nanmean(Xtr, axis=0)
    means = np.where(np.isfinite(means), means, 0.0)  # all-NaN column -> 0
    for X in (Xtr, Xte):
        nan_mask = np.isnan(X)
        if nan_mask.any():
            X[nan_mask] = np.broadcast_to(means, X.shape)[nan_mask]

    mins = Xtr.min(axis=0)
    maxs = Xtr.max(axis=0)
    span = maxs - mins
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)

    def _apply(X):
        out = (X - mins) / safe_span
        out[:, constant] = 0.0
        return out

    stats = NormStats(impute_means=means, mins=mins, maxs=maxs)
    train_n = Dataset(train.dataset_id, train.schema, _apply(Xtr), train.y.copy())
    test_n = Dataset(test.dataset_id, test.schema, _apply(Xte), test.y.copy())
    return train_n, test_n, stats


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------


def _largest_remainder_counts(class_counts: np.ndarray, fraction: float) -> np.ndarray:
    """Per-class train counts: floor of the exact quota, then distribute the
    remainder (against round(n * fraction)) by largest fractional part."""
    quotas = class_counts * fraction
    base = np.floor(quotas).astype(np.int64)
    total = round(float(class_counts.sum() * fraction))
    remainder = total - int(base.sum())
    if remainder > 0:
        frac = quotas - base
        order = np.lexsort((np.arange(len(frac)), -frac))  # largest remainder, ties by class index
        for c in order[:remainder]:
            base[c] += 1
    return base


def stratified_resample(
    d: Dataset, resample_id: int, master_seed: int, train_fraction: float = 0.5
) -> SplitPair:
    """One stratified random train/test split, deterministic given
    (master_seed, dataset id, resample_id)."""
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    seed = derive_seed(master_seed, d.dataset_id, resample_id, "resample")
    rng = np.random.default_rng(seed)

    counts = d.class_counts()
    present = np.flatnonzero(counts)
    train_counts = _largest_remainder_counts(counts, train_fraction)
    for c in present:
        if train_counts[c] == 0:
            raise DatasetError(
                f"{d.dataset_id}: class {d.schema.class_values[c]!r} would have no training instances"
            )
        if train_counts[c] == counts[c]:
            raise DatasetError(
                f"{d.dataset_id}: class {d.schema.class_values[c]!r} would have no test instances"
            )

    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for c in present:
        rows = np.flatnonzero(d.y == c)
        perm = rng.permutation(rows)
        train_idx.append(perm[: train_counts[c]])
        test_idx.append(perm[train_counts[c]:])
    train_rows = np.sort(np.concatenate(train_idx))
    test_rows = np.sort(np.concatenate(test_idx))

    return SplitPair(
        train=d.subset(train_rows),
        test=d.subset(test_rows),
        resample_id=resample_id,
        seed=seed,
    )


def kfold_partition(d: Dataset, k: int, seed: int) -> list[tuple[Dataset, Dataset]]:
    """Stratified k-fold partition: list of (train, validation) dataset pairs.

    Shuffled instances of each class are dealt to folds by a round-robin
    pointer that continues across classes, so folds are stratified where class
    counts allow and overall fold sizes never differ by more than one.
    """
    if k < 2:
        raise DatasetError(f"k must be >= 2, got {k}")
    if k > d.n_rows:
        raise DatasetError(f"k={k} exceeds the {d.n_rows} available rows")
    rng = np.random.default_rng(seed)

    fold_of = np.empty(d.n_rows, dtype=np.int64)
    pointer = 0
    for c in np.flatnonzero(d.class_counts()):
        rows = np.flatnonzero(d.y == c)
        for idx in rng.permutation(rows):
            fold_of[idx] = pointer % k
            pointer += 1

    pairs = []
    for f in range(k):
        val_rows = np.flatnonzero(fold_of == f)
        train_rows = np.flatnonzero(fold_of != f)
        pairs.append((d.subset(train_rows), d.subset(val_rows)))
    return pairs
