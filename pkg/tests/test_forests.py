import numpy as np
import pytest

from clfbench.classifiers.forests import (
    RandomForestParams,
    RotationForestParams,
    forest_predict,
    resolve_n_features,
    rf_train,
    rot_train,
)
from clfbench.classifiers.tree import C45Params, c45_train
from clfbench.data import from_arrays
from clfbench.pca import pca_fit, pca_transform


def toy(n=120, m=9, seed=1, classes=2):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, m))
    y = (X[:, 0] + X[:, 1] > 0).astype(int) if classes == 2 else rng.integers(0, classes, n)
    return from_arrays("toy", X, y)


def test_n_features_resolution():
    assert resolve_n_features("sqrt", 16) == 4
    assert resolve_n_features("log2plus1", 15) == 4
    assert resolve_n_features("sqrt", 2) == 1
    assert resolve_n_features(5, 9) == 5
    with pytest.raises(ValueError):
        resolve_n_features(10, 9)


def test_rf_single_tree_equivalence():
    # one tree, bootstrap disabled, all features: identical to a plain unpruned tree
    d = toy()
    forest = rf_train(d, RandomForestParams(n_trees=1, n_features=9), seed=5, bootstrap=False)
    single = c45_train(d, C45Params(min_leaf=1, use_pruning=False))
    probe = np.random.default_rng(2).normal(size=(50, 9))
    assert np.array_equal(forest.predict(probe), single.predict(probe))


def test_rf_distribution_is_tree_average():
    d = toy()
    forest = rf_train(d, RandomForestParams(n_trees=7, n_features="sqrt"), seed=3)
    probe = d.X[:4]
    manual = sum(t.predict_proba_matrix(probe) for t in forest.trees) / 7
    assert np.allclose(forest.predict_proba_matrix(probe), manual)


def test_rf_deterministic_per_tree_substreams():
    d = toy()
    a = rf_train(d, RandomForestParams(n_trees=4, n_features="sqrt"), seed=9)
    b = rf_train(d, RandomForestParams(n_trees=4, n_features="sqrt"), seed=9)
    assert a.dump_lines() == b.dump_lines()


def test_rotation_partition_is_true_partition():
    for m, f, sizes in [(9, 3, [3, 3, 3]), (10, 3, [1, 3, 3, 3]), (5, 5, [5])]:
        d = toy(m=m, seed=4)
        model = rot_train(d, RotationForestParams(n_trees=3, group_size=f), seed=2)
        for rt in model.trees:
            assert sorted(len(g) for g in rt.groups) == sorted(sizes)
            assert np.array_equal(np.sort(np.concatenate(rt.groups)), np.arange(m))


def test_rotation_transform_invertible():
    d = toy(m=10, seed=4)
    model = rot_train(d, RotationForestParams(n_trees=4, group_size=3), seed=2)
    for rt in model.trees:
        rotated = rt.rotate(d.X)
        back = np.array(rotated, copy=True)
        for group, pca in zip(rt.groups, rt.pcas):
            back[:, group] = rotated[:, group] @ pca.components.T + pca.means
        assert np.abs(back - d.X).max() < 1e-8


def test_rotation_prefix_extension():
    d = toy(m=10, seed=4)
    small = rot_train(d, RotationForestParams(n_trees=3, group_size=3), seed=2)
    large = rot_train(d, RotationForestParams(n_trees=5, group_size=3), seed=2)
    for a, b in zip(small.trees, large.trees):
        assert all(np.array_equal(ga, gb) for ga, gb in zip(a.groups, b.groups))
        assert a.tree.dump_lines() == b.tree.dump_lines()
        assert all(np.array_equal(pa.components, pb.components) for pa, pb in zip(a.pcas, b.pcas))


def test_single_rotation_equals_pca_plus_tree():
    rng = np.random.default_rng(1)
    d = from_arrays("full", rng.normal(size=(60, 5)), rng.integers(0, 2, 60))
    model = rot_train(
        d,
        RotationForestParams(n_trees=1, group_size=5, sample_proportion=1.0),
        c45=C45Params(),
        seed=7,
        _force_all_classes=True,
    )
    pca = pca_fit(np.asarray(d.X, dtype=float))
    reference = c45_train(
        from_arrays("ref", pca_transform(pca, d.X), d.y), C45Params()
    )
    probe = rng.normal(size=(80, 5))
    assert np.array_equal(model.predict(probe), reference.predict(pca_transform(pca, probe)))


def test_rotation_handles_degenerate_groups():
    # constant columns force the identity-rotation fallback but training stays total
    rng = np.random.default_rng(0)
    X = np.column_stack([np.full(30, 3.0), rng.normal(size=30), np.full(30, -1.0)])
    y = (X[:, 1] > 0).astype(int)
    d = from_arrays("deg", X, y)
    model = rot_train(d, RotationForestParams(n_trees=3, group_size=2), seed=1)
    assert np.isfinite(model.predict_proba_matrix(d.X)).all()


def test_forest_predict_rules():
    d = toy()
    model = rf_train(d, RandomForestParams(n_trees=5, n_features="sqrt"), seed=0)
    dist = forest_predict(model, d.X[0])
    assert dist.shape == (2,)
    assert dist.sum() == pytest.approx(1.0)
    # unanimous mean equals the shared distribution
    same = np.array([[0.25, 0.75]])
    mean = np.mean([same, same, same], axis=0)
    assert np.array_equal(mean[0], same[0])


def test_vote_tie_prefers_lowest_class():
    # two trees voting (1,0) and (0,1) average to (0.5, 0.5) -> class 0
    dist = np.mean([np.array([1.0, 0.0]), np.array([0.0, 1.0])], axis=0)
    assert np.argmax(dist) == 0


def test_param_validation():
    with pytest.raises(ValueError):
        RandomForestParams(n_trees=0)
    with pytest.raises(ValueError):
        RotationForestParams(n_trees=1, sample_proportion=0.0)
    with pytest.raises(ValueError):
        RandomForestParams(n_trees=1, n_features="bogus")
