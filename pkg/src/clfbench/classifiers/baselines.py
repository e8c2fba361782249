"""Reference classifiers: ridge-penalized multinomial logistic regression and 1-NN.

Logistic regression maximizes the multinomial log-likelihood minus
``ridge * ||weights||^2`` (intercepts unpenalized) by full Newton steps with
step halving. The last class is the reference class, so a k-class problem has
(k-1) x (f+1) coefficients with the intercept in column 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from clfbench.data import Dataset


@dataclass(frozen=True)
class LogisticParams:
    ridge: float = 1e-8
    max_newton_iters: int = 200
    gradient_tolerance: float = 1e-8

    def __post_init__(self):
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray  # (k-1) x (f+1), intercept in column 0
    n_classes: int

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.weights.shape[1] - 1:
            raise ValueError(
                f"instance arity {X.shape[1]} != training arity {self.weights.shape[1] - 1}"
            )
        scores = np.zeros((len(X), self.n_classes))
        scores[:, :-1] = X @ self.weights[:, 1:].T + self.weights[:, 0]
        scores -= scores.max(axis=1, keepdims=True)
        p = np.exp(scores)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)


def penalized_log_likelihood(weights: np.ndarray, X, y, k: int, ridge: float) -> float:
    """Multinomial log-likelihood minus ridge * squared non-intercept weights."""
    n = len(X)
    scores = np.zeros((n, k))
    scores[:, :-1] = X @ weights[:, 1:].T + weights[:, 0]
    ll = float(scores[np.arange(n), y].sum() - logsumexp(scores, axis=1).sum())
    return ll - ridge * float((weights[:, 1:] ** 2).sum())


def logistic_gradient(weights: np.ndarray, X, y, k: int, ridge: float) -> np.ndarray:
    """Gradient of the penalized log-likelihood, same shape as ``weights``."""
    n = len(X)
    Z = np.column_stack([np.ones(n), X])
    scores = np.zeros((n, k))
    scores[:, :-1] = Z @ weights.T
    scores -= scores.max(axis=1, keepdims=True)
    P = np.exp(scores)
    P /= P.sum(axis=1, keepdims=True)
    Y = np.zeros((n, k))
    Y[np.arange(n), y] = 1.0
    grad = (Y[:, :-1] - P[:, :-1]).T @ Z
    grad[:, 1:] -= 2.0 * ridge * weights[:, 1:]
    return grad


def logistic_train(d: Dataset, p: LogisticParams = LogisticParams()) -> LogisticModel:
    """Newton/IRLS fit of the multinomial model; converges when the gradient
    infinity-norm drops to the tolerance, or returns the best iterate with a
    warning if the iteration cap is hit."""
    X = np.asarray(d.X, dtype=np.float64)
    if X.dtype != np.float64:
        raise ValueError("logistic regression requires encoded numeric data")
    y = d.y
    n, f = X.shape
    k = d.schema.num_classes
    m = k - 1
    Z = np.column_stack([np.ones(n), X])
    W = np.zeros((m, f + 1))

    ridge_diag = np.zeros(m * (f + 1))
    mask = np.ones((m, f + 1), dtype=bool)
    mask[:, 0] = False
    ridge_diag[mask.ravel()] = 2.0 * p.ridge

    Y = np.zeros((n, m))
    Y[np.arange(n)[y < m], y[y < m]] = 1.0

    def objective(Wc):
        return penalized_log_likelihood(Wc, X, y, k, p.ridge)

    obj = objective(W)
    if not np.isfinite(obj):
        raise ValueError("non-finite log-likelihood; input data looks unscaled")
    best_W, best_obj = W.copy(), obj

    for _ in range(p.max_newton_iters):
        scores = np.zeros((n, k))
        scores[:, :-1] = Z @ W.T
        scores -= scores.max(axis=1, keepdims=True)
        P = np.exp(scores)
        P /= P.sum(axis=1, keepdims=True)
        Pm = P[:, :-1]

        grad = (Y - Pm).T @ Z
        grad[:, 1:] -= 2.0 * p.ridge * W[:, 1:]
        if not np.isfinite(grad).all():
            raise ValueError("non-finite gradient; input data looks unscaled")
        if np.abs(grad).max() <= p.gradient_tolerance:
            break

        # Hessian of the NEGATIVE penalized LL: sum_i (diag(p_i) - p_i p_i^T) (x) Z_i Z_i^T.
        G = (Pm[:, :, None] * Z[:, None, :]).reshape(n, m * (f + 1))
        H = -(G.T @ G)
        WZZ = np.einsum("ic,id,ie->cde", Pm, Z, Z)  # m diagonal blocks
        Hb = H.reshape(m, f + 1, m, f + 1)
        idx = np.arange(m)
        Hb[idx, :, idx, :] += WZZ
        H = Hb.reshape(m * (f + 1), m * (f + 1))
        H[np.diag_indices_from(H)] += ridge_diag + 1e-12

        try:
            delta = np.linalg.solve(H, grad.ravel()).reshape(m, f + 1)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(H, grad.ravel(), rcond=None)[0].reshape(m, f + 1)

        step = 1.0
        for _ in range(50):
            W_new = W + step * delta
            new_obj = objective(W_new)
            if np.isfinite(new_obj) and new_obj >= obj - 1e-15:
                break
            step /= 2.0
        else:
            break  # no improving step length; stop at the current iterate
        W, obj = W_new, new_obj
        if obj > best_obj:
            best_W, best_obj = W.copy(), obj
    else:
        warnings.warn(
            "logistic regression hit its Newton iteration cap; returning the best iterate",
            stacklevel=2,
        )
        W = best_W

    return LogisticModel(weights=W, n_classes=k)


@dataclass(frozen=True)
class Nn1Model:
    """Lazy 1-nearest-neighbour: stores the training split."""

    X: np.ndarray
    y: np.ndarray
    n_classes: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.X.shape[1]:
            raise ValueError(f"instance arity {X.shape[1]} != training arity {self.X.shape[1]}")
        if len(self.X) == 0:
            raise ValueError("empty training set")
        d2 = (
            (X * X).sum(axis=1)[:, None]
            + (self.X * self.X).sum(axis=1)[None, :]
            - 2.0 * X @ self.X.T
        )
        return self.y[np.argmin(d2, axis=1)]  # argmin takes the earliest row on ties

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        labels = self.predict(X)
        out = np.zeros((len(labels), self.n_classes))
        out[np.arange(len(labels)), labels] = 1.0
        return out


def nn1_predict(train: Dataset, x: np.ndarray) -> int:
    """Class of the Euclidean-nearest training row; distance ties -> earliest row."""
    model = Nn1Model(np.asarray(train.X, dtype=np.float64), train.y, train.schema.num_classes)
    return int(model.predict(np.atleast_2d(x))[0])
