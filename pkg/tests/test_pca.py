import numpy as np
import pytest

from clfbench.pca import (
    DegeneratePcaError,
    EigenError,
    PcaModel,
    covariance,
    pca_fit,
    pca_transform,
    symmetric_eigen,
)


def test_covariance_hand_value():
    rows = np.array([[1.0, 1.0], [-1.0, -1.0], [2.0, 2.0], [-2.0, -2.0]])
    c = covariance(rows)
    assert np.allclose(c, 10.0 / 3.0)


def test_covariance_identical_rows_zero():
    c = covariance(np.ones((5, 3)) * 4.2)
    assert np.all(c == 0.0)


def test_covariance_single_row_errors():
    with pytest.raises(DegeneratePcaError):
        covariance(np.array([[1.0, 2.0]]))


def test_eigen_diagonal():
    values, vectors = symmetric_eigen(np.diag([3.0, 1.0]))
    assert np.allclose(values, [3.0, 1.0])
    assert np.allclose(vectors, np.eye(2))


def test_eigen_2x2_analytic():
    values, vectors = symmetric_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(values, [3.0, 1.0])
    assert np.allclose(vectors[:, 0], np.full(2, 1.0 / np.sqrt(2)))


def test_eigen_zero_matrix():
    values, vectors = symmetric_eigen(np.zeros((4, 4)))
    assert np.all(values == 0.0)
    assert np.allclose(vectors.T @ vectors, np.eye(4))


def test_eigen_rejects_asymmetric():
    with pytest.raises(EigenError):
        symmetric_eigen(np.array([[1.0, 2.0], [0.5, 1.0]]))


def test_eigen_matches_numpy_on_random_matrices():
    rng = np.random.default_rng(0)
    for _ in range(25):
        f = int(rng.integers(1, 21))
        a = covariance(rng.normal(size=(int(rng.integers(2, 40)), f)))
        values, vectors = symmetric_eigen(a)
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.abs(values - ref).max() <= 1e-8 * max(1.0, abs(ref).max())
        assert np.abs(a @ vectors - vectors * values).max() <= 1e-8 * max(1.0, np.linalg.norm(a))
        assert np.abs(vectors.T @ vectors - np.eye(f)).max() < 1e-8


def test_eigen_sign_convention_deterministic():
    rng = np.random.default_rng(3)
    a = covariance(rng.normal(size=(30, 6)))
    _, v1 = symmetric_eigen(a)
    _, v2 = symmetric_eigen(a.copy())
    assert np.array_equal(v1, v2)
    for j in range(6):
        col = v1[:, j]
        assert col[np.argmax(np.abs(col))] > 0


def test_pca_correlated_2d():
    rng = np.random.default_rng(1)
    t = rng.normal(size=50)
    rows = np.column_stack([t, t])  # perfectly correlated along y = x
    m = pca_fit(rows)
    assert np.allclose(np.abs(m.components[:, 0]), 1.0 / np.sqrt(2))
    assert m.eigenvalues[1] == pytest.approx(0.0, abs=1e-12)


def test_pca_transform_diagonalizes_covariance():
    rng = np.random.default_rng(2)
    rows = rng.normal(size=(6, 4)) * [1.0, 3.0, 0.5, 2.0]
    m = pca_fit(rows)
    transformed = pca_transform(m, rows)
    c = covariance(transformed)
    off = c - np.diag(np.diag(c))
    assert np.abs(off).max() < 1e-8
    assert np.allclose(np.diag(c), m.eigenvalues, atol=1e-8)


def test_pca_trace_preserved():
    rng = np.random.default_rng(4)
    for _ in range(10):
        rows = rng.normal(size=(int(rng.integers(3, 40)), int(rng.integers(1, 15))))
        m = pca_fit(rows)
        trace = np.trace(covariance(rows))
        assert abs(trace - m.eigenvalues.sum()) <= 1e-8 * max(1.0, trace)


def test_pca_transform_affine():
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(12, 3))
    m = pca_fit(rows)
    x, y = rng.normal(size=(2, 3))
    lhs = pca_transform(m, 2.0 * x[None]) - pca_transform(m, 2.0 * y[None])
    rhs = (2.0 * (x - y)) @ m.components
    assert np.array_equal(lhs[0], rhs)


def test_pca_needs_two_rows():
    with pytest.raises(DegeneratePcaError):
        pca_fit(np.array([[1.0, 2.0]]))


def test_identity_model():
    m = PcaModel.identity(3)
    rows = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(pca_transform(m, rows), rows)
