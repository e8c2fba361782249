import numpy as np
import pytest

from clfbench.data import (
    Dataset,
    DatasetError,
    encode_nominal_to_binary,
    from_arrays,
    kfold_partition,
    load_dataset,
    normalize_fit_apply,
    stratified_resample,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


# ---------------------------------------------------------------- loading


def test_csv_basic(tmp_path):
    path = write(tmp_path, "toy.csv", "f1,f2,class\n1,2.5,a\n3,4,b\n5,6,a\n")
    d = load_dataset(path)
    assert d.dataset_id == "toy"
    assert [f.kind for f in d.schema.features] == ["numeric", "numeric"]
    assert d.schema.class_values == ("a", "b")
    assert d.n_rows == 3 and d.X.dtype == np.float64
    assert d.y.tolist() == [0, 1, 0]


def test_arff_nominal_value_list(tmp_path):
    path = write(
        tmp_path,
        "c.arff",
        "% comment\n@RELATION colors\n@ATTRIBUTE color {r,g,b}\n"
        "@attribute size numeric\n@attribute class {yes,no}\n"
        "@DATA\nr,1.0,yes\nb,2.0,no\n",
    )
    d = load_dataset(path)
    assert d.schema.features[0].kind == "nominal"
    assert d.schema.features[0].values == ("r", "g", "b")
    assert d.schema.class_values == ("yes", "no")


def test_arity_mismatch_names_row(tmp_path):
    path = write(tmp_path, "bad.csv", "f1,f2,class\n1,2,a\n1,2,3,b\n3,4,b\n")
    with pytest.raises(DatasetError, match="bad.csv:3"):
        load_dataset(path)


def test_unknown_class_label(tmp_path):
    path = write(
        tmp_path, "u.arff",
        "@relation u\n@attribute f numeric\n@attribute class {a,b}\n@data\n1,a\n2,zzz\n",
    )
    with pytest.raises(DatasetError, match="zzz"):
        load_dataset(path)


def test_empty_dataset(tmp_path):
    path = write(tmp_path, "e.csv", "f1,class\n")
    with pytest.raises(DatasetError, match="no data rows"):
        load_dataset(path)


def test_missing_values(tmp_path):
    path = write(tmp_path, "m.csv", "f1,f2,class\n1,r,a\n?,g,b\n3,?,a\n4,g,b\n")
    d = load_dataset(path)
    # numeric missing stays NaN until normalization
    assert np.isnan(float(d.X[1, 0]))
    # nominal missing imputed with the mode (g appears twice)
    assert d.X[2, 1] == "g"


def test_sparse_arff_rejected(tmp_path):
    path = write(
        tmp_path, "s.arff",
        "@relation s\n@attribute f numeric\n@attribute class {a,b}\n@data\n{0 1},a\n",
    )
    with pytest.raises(DatasetError, match="sparse"):
        load_dataset(path)


# ---------------------------------------------------------------- encoding


def test_encode_three_valued_nominal(tmp_path):
    path = write(
        tmp_path, "n.arff",
        "@relation n\n@attribute color {a,b,c}\n@attribute class {x,y}\n@data\nb,x\na,y\nc,x\n",
    )
    d = encode_nominal_to_binary(load_dataset(path))
    assert d.n_features == 3
    assert d.X[0].tolist() == [0.0, 1.0, 0.0]
    assert d.X[1].tolist() == [1.0, 0.0, 0.0]
    # indicators of one source feature sum to 1 per row
    assert np.all(d.X.sum(axis=1) == 1.0)


def test_encode_binary_nominal_single_column(tmp_path):
    path = write(
        tmp_path, "b.arff",
        "@relation b\n@attribute ans {yes,no}\n@attribute class {x,y}\n@data\nyes,x\nno,y\n",
    )
    d = encode_nominal_to_binary(load_dataset(path))
    assert d.n_features == 1
    assert d.X[:, 0].tolist() == [1.0, 0.0]


def test_encode_all_numeric_identity():
    d = from_arrays("t", [[1.0, 2.0], [3.0, 4.0]], [0, 1])
    assert encode_nominal_to_binary(d) is d


def test_encode_preserves_rows_and_labels(tmp_path):
    path = write(
        tmp_path, "p.arff",
        "@relation p\n@attribute c {u,v,w}\n@attribute f numeric\n"
        "@attribute class {a,b}\n@data\nu,1,a\nv,2,b\nw,3,a\nu,4,b\n",
    )
    raw = load_dataset(path)
    enc = encode_nominal_to_binary(raw)
    assert enc.n_rows == raw.n_rows
    assert enc.y.tolist() == raw.y.tolist()


# ---------------------------------------------------------------- normalization


def test_normalize_linear_map():
    tr = from_arrays("t", [[0.0], [10.0]], [0, 1])
    te = from_arrays("t", [[5.0], [12.0]], [0, 1])
    tr_n, te_n, stats = normalize_fit_apply(tr, te)
    assert tr_n.X[:, 0].tolist() == [0.0, 1.0]
    assert te_n.X[0, 0] == 0.5
    assert te_n.X[1, 0] == pytest.approx(1.2)  # outside the train range, not clipped


def test_normalize_constant_feature_maps_to_zero():
    tr = from_arrays("t", [[7.0], [7.0]], [0, 1])
    te = from_arrays("t", [[123.0]], [0], class_values=["c0", "c1"])
    tr_n, te_n, _ = normalize_fit_apply(tr, te)
    assert np.all(tr_n.X == 0.0) and np.all(te_n.X == 0.0)


def test_normalize_imputes_with_train_mean():
    tr = from_arrays("t", [[0.0], [np.nan], [10.0]], [0, 1, 0])
    te = from_arrays("t", [[np.nan]], [1], class_values=["c0", "c1"])
    tr_n, te_n, stats = normalize_fit_apply(tr, te)
    assert stats.impute_means[0] == 5.0
    assert tr_n.X[1, 0] == 0.5 and te_n.X[0, 0] == 0.5
    assert np.isfinite(tr_n.X).all() and np.isfinite(te_n.X).all()


def test_normalize_idempotent():
    rng = np.random.default_rng(0)
    tr = from_arrays("t", rng.normal(size=(20, 4)) * 13 + 5, rng.integers(0, 2, 20))
    te = from_arrays("t", rng.normal(size=(8, 4)), rng.integers(0, 2, 8))
    tr1, te1, _ = normalize_fit_apply(tr, te)
    tr2, te2, _ = normalize_fit_apply(tr1, te1)
    assert np.array_equal(tr1.X, tr2.X)
    assert np.array_equal(te1.X, te2.X)


# ---------------------------------------------------------------- resampling


def balanced_dataset(n=100, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = np.arange(n) % 2
    return from_arrays("bal", X, y)


def test_resample_exact_stratification():
    d = balanced_dataset(100)
    pair = stratified_resample(d, 0, master_seed=7, train_fraction=0.5)
    assert pair.train.n_rows == 50 and pair.test.n_rows == 50
    assert pair.train.class_counts().tolist() == [25, 25]
    assert pair.test.class_counts().tolist() == [25, 25]


def test_resample_deterministic():
    d = balanced_dataset(60)
    a = stratified_resample(d, 3, master_seed=11)
    b = stratified_resample(d, 3, master_seed=11)
    assert np.array_equal(a.train.X, b.train.X)
    assert np.array_equal(a.test.y, b.test.y)
    assert a.seed == b.seed
    c = stratified_resample(d, 4, master_seed=11)
    assert not np.array_equal(a.train.X, c.train.X)


def test_resample_round_trip_multiset():
    rng = np.random.default_rng(5)
    d = from_arrays("rt", rng.normal(size=(37, 2)), rng.integers(0, 3, 37))
    for r in range(5):
        pair = stratified_resample(d, r, master_seed=2, train_fraction=0.4)
        combined = np.vstack([pair.train.X, pair.test.X])
        key = np.lexsort(combined.T)
        orig_key = np.lexsort(d.X.T)
        assert np.allclose(combined[key], d.X[orig_key])
        assert pair.train.n_rows + pair.test.n_rows == d.n_rows


def test_resample_empty_class_errors():
    d = from_arrays("one", np.arange(10.0).reshape(-1, 1), [0] * 10, class_values=["only", "ghost"])
    with pytest.raises(DatasetError, match="only"):
        stratified_resample(d, 0, master_seed=0, train_fraction=0.05)


def test_kfold_leave_one_out_shape():
    d = balanced_dataset(10)
    folds = kfold_partition(d, 10, seed=0)
    assert len(folds) == 10
    assert all(val.n_rows == 1 for _, val in folds)


def test_kfold_stratified_partition():
    d = balanced_dataset(100)
    folds = kfold_partition(d, 10, seed=3)
    for _, val in folds:
        assert val.class_counts().tolist() == [5, 5]
    sizes = [val.n_rows for _, val in folds]
    assert max(sizes) - min(sizes) <= 1
    # folds are a partition of the rows
    all_rows = np.vstack([val.X for _, val in folds])
    assert all_rows.shape[0] == d.n_rows
    key = np.lexsort(all_rows.T)
    orig = np.lexsort(d.X.T)
    assert np.allclose(all_rows[key], d.X[orig])


def test_kfold_too_many_folds():
    d = balanced_dataset(2)
    with pytest.raises(DatasetError):
        kfold_partition(d, 3, seed=0)


def test_kfold_sizes_balanced_with_awkward_classes():
    # 2 classes x 5 instances, k=4: per-class dealing alone would give 4,2,2,2
    rng = np.random.default_rng(1)
    d = from_arrays("awk", rng.normal(size=(10, 2)), [0] * 5 + [1] * 5)
    folds = kfold_partition(d, 4, seed=9)
    sizes = sorted(val.n_rows for _, val in folds)
    assert max(sizes) - min(sizes) <= 1
