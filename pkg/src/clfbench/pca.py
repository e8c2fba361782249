"""Dense symmetric eigendecomposition and dimension-preserving PCA.

The eigensolver is a cyclic Jacobi iteration: the matrices rotated here are
tiny (a rotation-forest feature group is 3 wide, a full covariance rarely
more than a few dozen), so Jacobi's simplicity and accuracy beat anything
fancier. Eigenvector signs follow a fixed convention (the largest-magnitude
component of each vector is made positive) so fitted models are reproducible
bit-for-bit across runs.

PCA keeps all components: it is used as a same-dimension rotation of a
feature subset, never for truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EigenError(ValueError):
    pass


class DegeneratePcaError(ValueError):
    """Fit asked for on fewer than two rows; callers decide the fallback."""


def covariance(rows: np.ndarray) -> np.ndarray:
    """Sample covariance (divisor n-1) of an n x f matrix, exactly symmetric."""
    rows = np.asarray(rows, dtype=np.float64)
    n = rows.shape[0]
    if n < 2:
        raise DegeneratePcaError(f"covariance needs at least 2 rows, got {n}")
    centered = rows - rows.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2.0


def symmetric_eigen(a: np.ndarray, sweep_cap: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (non-increasing) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic Jacobi: sweep all (p, q) pairs, rotating away each off-diagonal
    entry, until the off-diagonal mass is negligible relative to the matrix
    norm. Returns ``(values, vectors)`` with eigenvectors as columns, each
    sign-fixed so its largest-magnitude component is positive.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    if a.size and float(np.abs(a - a.T).max()) > 1e-10 * scale:
        raise EigenError("matrix is not symmetric within 1e-10")

    f = a.shape[0]
    A = (a + a.T) / 2.0
    V = np.eye(f)
    norm = np.linalg.norm(A)
    threshold = max(1e-13 * norm, np.finfo(np.float64).tiny)

    off_mask = ~np.eye(f, dtype=bool)
    for _ in range(sweep_cap):
        # Cancellation-free convergence measure: largest off-diagonal entry.
        if f < 2 or np.abs(A[off_mask]).max() <= threshold:
            break
        for p in range(f - 1):
            for q in range(p + 1, f):
                apq = A[p, q]
                if abs(apq) <= threshold:
                    continue
                app, aqq = A[p, p], A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # Rotate rows/columns p and q of A (A <- J^T A J) and update V.
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
                A[q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        raise EigenError(f"Jacobi iteration did not converge in {sweep_cap} sweeps")

    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = V[:, order]
    for j in range(f):
        col = vectors[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            vectors[:, j] = -col
    return values, vectors


@dataclass(frozen=True)
class PcaModel:
    """Column means plus the full orthonormal component basis (no truncation)."""

    means: np.ndarray
    components: np.ndarray  # f x f, eigenvectors as columns
    eigenvalues: np.ndarray  # non-increasing

    @classmethod
    def identity(cls, n_features: int) -> "PcaModel":
        """Identity rotation with zero means (degenerate-data fallback)."""
        return cls(
            means=np.zeros(n_features),
            components=np.eye(n_features),
            eigenvalues=np.zeros(n_features),
        )


def pca_fit(rows: np.ndarray) -> PcaModel:
    """Center by column means, eigendecompose the covariance, keep all components."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise DegeneratePcaError(f"expected an n x f matrix with f >= 1, got shape {rows.shape}")
    if rows.shape[0] < 2:
        raise DegeneratePcaError(f"PCA fit needs at least 2 rows, got {rows.shape[0]}")
    means = rows.mean(axis=0)
    values, vectors = symmetric_eigen(covariance(rows))
    values = np.maximum(values, 0.0)  # clamp tiny negative round-off
    return PcaModel(means=means, components=vectors, eigenvalues=values)


def pca_transform(model: PcaModel, rows: np.ndarray) -> np.ndarray:
    """Subtract the fitted means and project onto the component basis."""
    rows = np.asarray(rows, dtype=np.float64)
    return (rows - model.means) @ model.components
