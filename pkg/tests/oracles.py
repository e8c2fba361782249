"""Independent reference computations used by the test suite.

These deliberately avoid the library's own code paths wherever a check has a
dual route: the SVM oracle runs its own greedy 2-variable coordinate ascent on
the dual, and the covariance/PCA references go through numpy.linalg.
"""

import numpy as np

from clfbench.classifiers.svm import kernel_matrix


def svm_dual_oracle(X, y, kernel, c, stationarity_tol=1e-10, max_iter=2_000_000):
    """Maximize the SVM dual by projected coordinate ascent on max-violating pairs.

    Runs until the KKT violation gap drops below ``stationarity_tol``.
    Returns (objective, alpha).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    K = kernel_matrix(kernel, X, X)
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    g = np.ones(n)  # gradient of W(alpha) = sum(alpha) - 0.5 a^T Q a
    for _ in range(max_iter):
        yg = y * g
        up = (y > 0) & (alpha < c) | (y < 0) & (alpha > 0)
        down = (y > 0) & (alpha > 0) | (y < 0) & (alpha < c)
        if not up.any() or not down.any():
            break
        iu = np.flatnonzero(up)
        idn = np.flatnonzero(down)
        i = iu[np.argmax(yg[iu])]
        j = idn[np.argmin(yg[idn])]
        if yg[i] - yg[j] < stationarity_tol:
            break
        quad = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
        step = (yg[i] - yg[j]) / quad if quad > 1e-300 else np.inf
        step = min(
            step,
            (c - alpha[i]) if y[i] > 0 else alpha[i],
            alpha[j] if y[j] > 0 else (c - alpha[j]),
        )
        if step <= 0:
            break
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        g -= step * (y[i] * Q[i] - y[j] * Q[j])
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay), alpha


def svm_kkt_violation(model, X, y, c, tol_bound=1e-9):
    """Largest KKT violation of a trained binary model on its training data."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    f = model.decision_values(X)
    margin = y * f
    alpha = model.full_alphas(len(y))
    at_zero = alpha <= tol_bound
    at_c = alpha >= c - tol_bound
    interior = ~(at_zero | at_c)
    viol = np.zeros(len(y))
    viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    viol[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    viol[interior] = np.abs(margin[interior] - 1.0)
    return float(viol.max())
