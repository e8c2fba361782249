"""Binary SVM trained by sequential minimal optimization, with one-vs-one multiclass.

The solver follows Platt's SMO: the outer loop alternates full passes over the
data with passes over the non-bound multipliers, the inner loop picks the
second working-set member by the largest error difference, falling back to
randomized sweeps. Kernel rows are cached with an LRU budget so memory stays
bounded on larger problems. The error cache covers every training point and is
updated vectorized after each successful pair step.

Kernels: linear ``x.y``, polynomial ``(x.y)^degree`` (degree 2 is the
"quadratic" kernel), RBF ``exp(-gamma * ||x - y||^2)``. Multiclass problems
train one binary machine per unordered class pair on that pair's instances
only and predict by majority vote, ties going to the lowest class index.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from clfbench.data import Dataset
from clfbench.seeding import rng_from


class ConvergenceError(RuntimeError):
    """SMO hit its pair-optimization cap; carries the best-so-far KKT violation."""

    def __init__(self, message: str, kkt_violation: float):
        super().__init__(message)
        self.kkt_violation = kkt_violation


@dataclass(frozen=True)
class KernelSpec:
    kind: str  # "linear" | "polynomial" | "rbf"
    degree: int = 2
    gamma: float = 0.01

    def __post_init__(self):
        if self.kind not in ("linear", "polynomial", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {self.degree}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError(f"rbf gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class SmoParams:
    c: float = 1.0
    kkt_tolerance: float = 1e-3
    alpha_epsilon: float = 1e-12
    max_pair_optimizations: int = 10_000_000
    kernel_cache_rows: int = 4096

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"C must be > 0, got {self.c}")
        if not (self.kkt_tolerance > 0 and self.alpha_epsilon > 0):
            raise ValueError("tolerances must be positive")


def kernel_eval(k: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel value for a single pair of equal-arity vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"kernel arity mismatch: {x.shape} vs {y.shape}")
    if k.kind == "linear":
        return float(x @ y)
    if k.kind == "polynomial":
        return float((x @ y) ** k.degree)
    diff = x - y
    return float(np.exp(-k.gamma * (diff @ diff)))


def kernel_matrix(k: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel values for all pairs of rows of A and B."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if k.kind == "linear":
        return A @ B.T
    if k.kind == "polynomial":
        return (A @ B.T) ** k.degree
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    return np.exp(-k.gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class BinarySvmModel:
    """Support vectors with their dual weights: f(x) = sum a_i y_i k(x_i, x) + b."""

    kernel: KernelSpec
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray  # +-1 per support vector
    bias: float
    c: float
    support_indices: np.ndarray = None  # rows of the training set kept as SVs

    def full_alphas(self, n_train: int) -> np.ndarray:
        """Dual variables for every training row (zero off the support set)."""
        alpha = np.zeros(n_train)
        alpha[self.support_indices] = self.alphas
        return alpha

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.support_vectors.shape[1]:
            raise ValueError(
                f"instance arity {X.shape[1]} does not match training arity "
                f"{self.support_vectors.shape[1]}"
            )
        if len(self.support_vectors) == 0:
            return np.full(len(X), self.bias)
        K = kernel_matrix(self.kernel, X, self.support_vectors)
        return K @ (self.alphas * self.labels) + self.bias

    def decision_value(self, x: np.ndarray) -> float:
        return float(self.decision_values(np.atleast_2d(x))[0])


class _RowCache:
    """LRU cache of kernel matrix rows."""

    def __init__(self, X: np.ndarray, kernel: KernelSpec, budget_rows: int):
        self.X = X
        self.kernel = kernel
        self.budget = max(1, budget_rows)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        if kernel.kind == "rbf":
            self._sq_norms = (X * X).sum(axis=1)

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        X, k = self.X, self.kernel
        if k.kind == "linear":
            r = X @ X[i]
        elif k.kind == "polynomial":
            r = (X @ X[i]) ** k.degree
        else:
            sq = self._sq_norms + self._sq_norms[i] - 2.0 * (X @ X[i])
            r = np.exp(-k.gamma * np.maximum(sq, 0.0))
        self._rows[i] = r
        if len(self._rows) > self.budget:
            self._rows.popitem(last=False)
        return r


class _SmoSolver:
    """One run of Platt's SMO on a fixed +-1 problem."""

    def __init__(self, X, y, kernel, params: SmoParams, seed: int):
        self.X = X
        self.y = y
        self.kernel = kernel
        self.p = params
        self.n = len(y)
        self.rng = rng_from(seed, "smo")
        self.cache = _RowCache(X, kernel, params.kernel_cache_rows)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        # E_i = f(x_i) - y_i; all alphas start at 0 so f = b = 0.
        self.E = -y.astype(np.float64)
        self.pair_optimizations = 0

    # -- working-set steps ---------------------------------------------------

    def _take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        p = self.p
        alph1, alph2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if s < 0:
            L = max(0.0, alph2 - alph1)
            H = min(p.c, p.c + alph2 - alph1)
        else:
            L = max(0.0, alph1 + alph2 - p.c)
            H = min(p.c, alph1 + alph2)
        if L >= H:
            return False

        row1 = self.cache.row(i1)
        row2 = self.cache.row(i2)
        k11, k12, k22 = row1[i1], row1[i2], row2[i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = alph2 + y2 * (E1 - E2) / eta
            a2 = min(max(a2, L), H)
        else:
            # Flat or concave direction: evaluate the objective at both ends.
            f1 = y1 * (E1 + self.b) - alph1 * k11 - s * alph2 * k12
            f2 = y2 * (E2 + self.b) - s * alph1 * k12 - alph2 * k22
            L1 = alph1 + s * (alph2 - L)
            H1 = alph1 + s * (alph2 - H)
            Lobj = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12
            Hobj = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12
            if Lobj < Hobj - p.alpha_epsilon:
                a2 = L
            elif Lobj > Hobj + p.alpha_epsilon:
                a2 = H
            else:
                a2 = alph2
        if abs(a2 - alph2) < p.alpha_epsilon * (a2 + alph2 + p.alpha_epsilon):
            return False

        a1 = alph1 + s * (alph2 - a2)
        if a1 < 0.0:
            a2 += s * a1
            a1 = 0.0
        elif a1 > p.c:
            a2 += s * (a1 - p.c)
            a1 = p.c
        # Snap arithmetic residue onto the bounds so bound/non-bound
        # classification (working sets, bias refinement, KKT checks) is exact.
        snap = p.alpha_epsilon * p.c
        a1 = 0.0 if a1 < snap else (p.c if a1 > p.c - snap else a1)
        a2 = 0.0 if a2 < snap else (p.c if a2 > p.c - snap else a2)

        d1 = y1 * (a1 - alph1)
        d2 = y2 * (a2 - alph2)
        # Kernel part of f at the two points, before choosing the new bias.
        u1 = (self.E[i1] + y1 - self.b) + d1 * k11 + d2 * k12
        u2 = (self.E[i2] + y2 - self.b) + d1 * k12 + d2 * k22
        b1 = y1 - u1
        b2 = y2 - u2
        if 0.0 < a1 < p.c:
            new_b = b1
        elif 0.0 < a2 < p.c:
            new_b = b2
        else:
            new_b = (b1 + b2) / 2.0

        # Incremental update keeps E exactly consistent with f even when the
        # step was clipped and only one of b1/b2 can hold (then b1 != b2).
        self.E += d1 * row1 + d2 * row2 + (new_b - self.b)
        self.alpha[i1] = a1
        self.alpha[i2] = a2
        self.b = new_b

        self.pair_optimizations += 1
        if self.pair_optimizations > p.max_pair_optimizations:
            raise ConvergenceError(
                f"SMO exceeded {p.max_pair_optimizations} pair optimizations "
                f"(best-so-far KKT violation {self.max_kkt_violation():.3e})",
                self.max_kkt_violation(),
            )
        return True

    def _examine(self, i2: int) -> int:
        p = self.p
        y2, alph2, E2 = self.y[i2], self.alpha[i2], self.E[i2]
        r2 = E2 * y2
        if not ((r2 < -p.kkt_tolerance and alph2 < p.c) or (r2 > p.kkt_tolerance and alph2 > 0.0)):
            return 0
        non_bound = np.flatnonzero((self.alpha > 0.0) & (self.alpha < p.c))
        if len(non_bound) > 1:
            i1 = int(non_bound[np.argmax(np.abs(self.E[non_bound] - E2))])
            if self._take_step(i1, i2):
                return 1
        if len(non_bound):
            start = self.rng.integers(len(non_bound))
            for i1 in np.roll(non_bound, -start):
                if self._take_step(int(i1), i2):
                    return 1
        start = self.rng.integers(self.n)
        for i1 in np.roll(np.arange(self.n), -start):
            if self._take_step(int(i1), i2):
                return 1
        return 0

    # -- driver ----------------------------------------------------------------

    def solve(self):
        num_changed = 0
        examine_all = True
        while num_changed > 0 or examine_all:
            num_changed = 0
            if examine_all:
                for i in range(self.n):
                    num_changed += self._examine(i)
            else:
                for i in np.flatnonzero((self.alpha > 0.0) & (self.alpha < self.p.c)):
                    num_changed += self._examine(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
        self._refine_bias()

    def _refine_bias(self):
        """Recenter b on the non-bound constraints (does not affect the dual)."""
        u = self.E + self.y - self.b  # kernel part of f
        non_bound = (self.alpha > 0.0) & (self.alpha < self.p.c)
        if non_bound.any():
            new_b = float(np.mean(self.y[non_bound] - u[non_bound]))
        else:
            # All bound: any b inside the KKT interval works; take its midpoint.
            # alpha=0 needs y*f >= 1, alpha=C needs y*f <= 1; each point turns
            # into a one-sided constraint b >= y-u or b <= y-u.
            lo, hi = -np.inf, np.inf
            lower = (self.y > 0) & (self.alpha <= 0.0) | (self.y < 0) & (self.alpha >= self.p.c)
            upper = (self.y < 0) & (self.alpha <= 0.0) | (self.y > 0) & (self.alpha >= self.p.c)
            if lower.any():
                lo = float(np.max(self.y[lower] - u[lower]))
            if upper.any():
                hi = float(np.min(self.y[upper] - u[upper]))
            if np.isfinite(lo) and np.isfinite(hi):
                new_b = (lo + hi) / 2.0
            elif np.isfinite(lo):
                new_b = lo
            elif np.isfinite(hi):
                new_b = hi
            else:
                new_b = self.b
        self.E += new_b - self.b
        self.b = new_b

    def max_kkt_violation(self) -> float:
        f = self.E + self.y
        margin = self.y * f
        viol = np.zeros(self.n)
        at_zero = self.alpha <= self.p.alpha_epsilon
        at_c = self.alpha >= self.p.c - self.p.alpha_epsilon
        interior = ~(at_zero | at_c)
        viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
        viol[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
        viol[interior] = np.abs(margin[interior] - 1.0)
        return float(viol.max()) if self.n else 0.0

    def dual_objective(self) -> float:
        sv = np.flatnonzero(self.alpha > 0.0)
        if not len(sv):
            return 0.0
        K = kernel_matrix(self.kernel, self.X[sv], self.X[sv])
        ay = self.alpha[sv] * self.y[sv]
        return float(self.alpha[sv].sum() - 0.5 * ay @ K @ ay)


def smo_train_binary(
    X: np.ndarray, y: np.ndarray, kernel: KernelSpec, params: SmoParams, seed: int
) -> BinarySvmModel:
    """Train one +-1 SVM by SMO.

    ``y`` must contain both labels. The model keeps only rows with alpha above
    ``alpha_epsilon`` as support vectors.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if set(np.unique(y)) - {-1.0, 1.0}:
        raise ValueError("labels must be -1/+1")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("both classes must be present")

    solver = _SmoSolver(X, y, kernel, params, seed)
    solver.solve()
    keep = solver.alpha > params.alpha_epsilon
    return BinarySvmModel(
        kernel=kernel,
        support_vectors=X[keep].copy(),
        alphas=solver.alpha[keep].copy(),
        labels=y[keep].copy(),
        bias=solver.b,
        c=params.c,
        support_indices=np.flatnonzero(keep),
    )


def smo_dual_objective(model: BinarySvmModel) -> float:
    """Dual objective sum(a) - 0.5 * (a y)^T K (a y) of a trained model."""
    if len(model.alphas) == 0:
        return 0.0
    K = kernel_matrix(model.kernel, model.support_vectors, model.support_vectors)
    ay = model.alphas * model.labels
    return float(model.alphas.sum() - 0.5 * ay @ K @ ay)


@dataclass(frozen=True)
class PairwiseSvmModel:
    """One binary machine per unordered class pair (i < j), majority vote."""

    n_classes: int
    models: dict = field(default_factory=dict)  # (i, j) -> BinarySvmModel
    n_features: int = 0

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"instance arity {X.shape[1]} != training arity {self.n_features}")
        votes = np.zeros((len(X), self.n_classes))
        for (i, j), model in self.models.items():
            f = model.decision_values(X)
            votes[:, j] += f > 0
            votes[:, i] += f <= 0
        return votes / max(1, len(self.models))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)


def pairwise_train(d: Dataset, kernel: KernelSpec, params: SmoParams, seed: int) -> PairwiseSvmModel:
    """Train C(k,2) binary SVMs, one per class pair, each on that pair's rows only."""
    k = d.schema.num_classes
    if k < 2:
        raise ValueError("need at least two classes")
    X = np.asarray(d.X, dtype=np.float64)
    models = {}
    for i in range(k):
        for j in range(i + 1, k):
            mask = (d.y == i) | (d.y == j)
            if not ((d.y == i).any() and (d.y == j).any()):
                continue  # pair absent from this split; no vote cast
            yij = np.where(d.y[mask] == j, 1.0, -1.0)
            models[(i, j)] = smo_train_binary(
                X[mask], yij, kernel, params, seed=rng_from(seed, "pair", i, j).integers(2**63)
            )
    return PairwiseSvmModel(n_classes=k, models=models, n_features=X.shape[1])


def pairwise_predict(m: PairwiseSvmModel, x: np.ndarray) -> int:
    """Majority vote over the binary machines; ties go to the lowest class index."""
    return int(m.predict(np.atleast_2d(x))[0])
