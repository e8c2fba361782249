import numpy as np
import pytest

from clfbench.classifiers.svm import (
    KernelSpec,
    PairwiseSvmModel,
    SmoParams,
    kernel_eval,
    pairwise_predict,
    pairwise_train,
    smo_dual_objective,
    smo_train_binary,
)
from clfbench.data import from_arrays
from oracles import svm_dual_oracle, svm_kkt_violation


# ---------------------------------------------------------------- kernels


def test_kernel_values():
    x = np.array([1.0, 2.0])
    y = np.array([3.0, 4.0])
    assert kernel_eval(KernelSpec("linear"), x, y) == 11.0
    assert kernel_eval(KernelSpec("polynomial", degree=2), x, y) == 121.0
    assert kernel_eval(KernelSpec("rbf", gamma=0.5), x, x) == 1.0


def test_rbf_weka_default_width():
    # gamma 0.01 at squared distance 100 gives e^-1
    x = np.zeros(1)
    y = np.array([10.0])
    assert kernel_eval(KernelSpec("rbf", gamma=0.01), x, y) == pytest.approx(np.exp(-1), rel=1e-12)


def test_kernel_arity_mismatch():
    with pytest.raises(ValueError):
        kernel_eval(KernelSpec("linear"), np.zeros(2), np.zeros(3))


def test_kernel_param_validation():
    with pytest.raises(ValueError):
        KernelSpec("rbf", gamma=0.0)
    with pytest.raises(ValueError):
        KernelSpec("polynomial", degree=0)
    with pytest.raises(ValueError):
        SmoParams(c=-1.0)


# ---------------------------------------------------------------- binary SMO


def test_two_point_hand_solution():
    # x=-1 (y=-1), x=+1 (y=+1), linear, C=10: alpha = (.5, .5), b = 0, f(x) = x
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    m = smo_train_binary(X, y, KernelSpec("linear"), SmoParams(c=10.0), seed=0)
    assert np.allclose(m.alphas, [0.5, 0.5], atol=1e-9)
    assert abs(m.bias) < 1e-9
    for probe in (-2.0, -0.3, 0.7, 1.5):
        assert m.decision_value(np.array([probe])) == pytest.approx(probe, abs=1e-8)


def test_dual_constraint_holds():
    rng = np.random.default_rng(0)
    for c in (0.1, 1.0, 100.0):
        X = rng.uniform(-1, 1, size=(15, 2))
        y = np.where(rng.random(15) < 0.5, 1.0, -1.0)
        y[:2] = [1.0, -1.0]
        m = smo_train_binary(X, y, KernelSpec("rbf", gamma=0.5), SmoParams(c=c), seed=1)
        assert abs(float((m.alphas * m.labels).sum())) <= 1e-8 * c
        assert np.all(m.alphas >= 0) and np.all(m.alphas <= c)


def test_duplication_leaves_decision_function():
    # interior optimum (no alpha at bound), so doubling every point changes nothing
    rng = np.random.default_rng(11)
    Xa = rng.normal(size=(20, 2)) + [3.0, 0.0]
    Xb = rng.normal(size=(20, 2)) - [3.0, 0.0]
    X = np.vstack([Xa, Xb])
    y = np.array([1.0] * 20 + [-1.0] * 20)
    probe = rng.normal(size=(25, 2)) * 3
    p = SmoParams(c=1000.0, kkt_tolerance=1e-8)
    m1 = smo_train_binary(X, y, KernelSpec("linear"), p, seed=0)
    assert m1.alphas.max() < 999.0  # strictly inside the box
    m2 = smo_train_binary(np.vstack([X, X]), np.concatenate([y, y]), KernelSpec("linear"), p, seed=9)
    gap = np.abs(m1.decision_values(probe) - m2.decision_values(probe)).max()
    assert gap < 1e-6


def test_label_symmetry_negates_f():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(20, 3))
    y = np.where(rng.random(20) < 0.5, 1.0, -1.0)
    y[:2] = [1.0, -1.0]
    probe = rng.normal(size=(15, 3))
    for kern in (KernelSpec("linear"), KernelSpec("rbf", gamma=0.3)):
        m_pos = smo_train_binary(X, y, kern, SmoParams(c=1.0), seed=3)
        m_neg = smo_train_binary(X, -y, kern, SmoParams(c=1.0), seed=3)
        assert np.abs(m_pos.decision_values(probe) + m_neg.decision_values(probe)).max() < 1e-8


def test_margin_property_separable():
    rng = np.random.default_rng(11)
    X = np.vstack([rng.normal(size=(30, 2)) + [3, 0], rng.normal(size=(30, 2)) - [3, 0]])
    y = np.array([1.0] * 30 + [-1.0] * 30)
    m = smo_train_binary(X, y, KernelSpec("linear"), SmoParams(c=1000.0, kkt_tolerance=1e-6), seed=0)
    f_sv = m.decision_values(m.support_vectors)
    assert np.all(np.abs(np.abs(f_sv) - 1.0) < 1e-3)


def test_oracle_equivalence_small():
    # fuller sweep lives in the acceptance suite
    rng = np.random.default_rng(42)
    kernels = [KernelSpec("linear"), KernelSpec("polynomial", degree=2), KernelSpec("rbf", gamma=0.5)]
    for trial in range(6):
        n = int(rng.integers(4, 13))
        X = rng.uniform(-1, 1, size=(n, int(rng.integers(1, 4))))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        if abs(y.sum()) == n:
            y[0] = -y[0]
        kern = kernels[trial % 3]
        c = [0.1, 1.0, 100.0][trial % 3]
        m = smo_train_binary(X, y, kern, SmoParams(c=c, kkt_tolerance=1e-6), seed=trial)
        oracle_obj, _ = svm_dual_oracle(X, y, kern, c)
        assert smo_dual_objective(m) >= oracle_obj - 1e-4
        assert svm_kkt_violation(m, X, y, c) <= 1e-3


def test_both_classes_required():
    with pytest.raises(ValueError):
        smo_train_binary(np.zeros((3, 1)), np.ones(3), KernelSpec("linear"), SmoParams(), seed=0)


def test_determinism():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(18, 2))
    y = np.where(X[:, 0] + 0.3 * rng.normal(size=18) > 0, 1.0, -1.0)
    if len(np.unique(y)) == 1:
        y[0] = -y[0]
    m1 = smo_train_binary(X, y, KernelSpec("rbf", gamma=1.0), SmoParams(), seed=5)
    m2 = smo_train_binary(X, y, KernelSpec("rbf", gamma=1.0), SmoParams(), seed=5)
    probe = rng.normal(size=(30, 2))
    assert np.array_equal(m1.decision_values(probe), m2.decision_values(probe))


# ---------------------------------------------------------------- multiclass


def three_class_blobs(n_per=15, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    X = np.vstack([rng.normal(size=(n_per, 2)) * 0.5 + c for c in centers])
    y = np.repeat([0, 1, 2], n_per)
    return from_arrays("blobs", X, y)


def test_pairwise_model_counts():
    d = three_class_blobs()
    m = pairwise_train(d, KernelSpec("linear"), SmoParams(), seed=0)
    assert len(m.models) == 3  # C(3,2)
    rng = np.random.default_rng(1)
    d4 = from_arrays("four", rng.normal(size=(40, 2)), np.arange(40) % 4)
    m4 = pairwise_train(d4, KernelSpec("rbf", gamma=1.0), SmoParams(), seed=0)
    assert len(m4.models) == 6  # C(4,2)


def test_pairwise_two_classes_single_model_sign():
    rng = np.random.default_rng(3)
    d = from_arrays("two", rng.normal(size=(20, 2)) + np.outer(np.arange(20) % 2, [4.0, 0]), np.arange(20) % 2)
    m = pairwise_train(d, KernelSpec("linear"), SmoParams(c=10.0), seed=0)
    assert len(m.models) == 1
    binary = m.models[(0, 1)]
    probe = rng.normal(size=(10, 2))
    votes = m.predict(probe)
    assert np.array_equal(votes, (binary.decision_values(probe) > 0).astype(int))


def test_pairwise_vote_tie_goes_to_lowest_index():
    m = PairwiseSvmModel(n_classes=3, models={}, n_features=2)
    assert pairwise_predict(m, np.zeros(2)) == 0


def test_pairwise_separable_accuracy():
    d = three_class_blobs()
    m = pairwise_train(d, KernelSpec("linear"), SmoParams(c=10.0), seed=0)
    assert np.mean(m.predict(d.X) == d.y) == 1.0


def test_pairwise_distribution_sums_to_one():
    d = three_class_blobs()
    m = pairwise_train(d, KernelSpec("rbf", gamma=1.0), SmoParams(), seed=0)
    probs = m.predict_proba_matrix(d.X[:5])
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
