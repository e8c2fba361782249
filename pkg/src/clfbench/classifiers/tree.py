"""C4.5-style decision trees on numeric features.

Induction is recursive top-down with the gain-ratio criterion. Numeric splits
test ``value <= threshold`` with thresholds at midpoints between sorted
distinct values; candidates creating a child smaller than ``min_leaf`` are
skipped, and a node becomes a leaf when pure or when no split has positive
information gain. Leaves store Laplace-smoothed class distributions.

Optional pessimistic-error pruning replaces a subtree with a leaf when the
leaf's upper-confidence error estimate does not exceed the subtree's (the
classic C4.5 ``addErrs`` bound at the given confidence).

Random-forest trees reuse the same builder with ``n_candidates`` set: each
node then scores a fresh uniform sample of that many features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from clfbench.data import Dataset


@dataclass(frozen=True)
class C45Params:
    min_leaf: int = 2
    use_pruning: bool = True
    pruning_confidence: float = 0.25

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if not 0.0 < self.pruning_confidence < 1.0:
            raise ValueError(f"pruning confidence must be in (0,1), got {self.pruning_confidence}")


@dataclass
class TreeNode:
    counts: np.ndarray  # class counts of the training rows reaching this node
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def distribution(self) -> np.ndarray:
        # Laplace smoothing keeps probabilities strictly positive.
        return (self.counts + 1.0) / (self.counts.sum() + len(self.counts))


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    n_classes: int
    n_features: int

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"instance arity {X.shape[1]} != training arity {self.n_features}")
        out = np.empty((len(X), self.n_classes))
        self._route(self.root, X, np.arange(len(X)), out)
        return out

    def _route(self, node: TreeNode, X, rows, out):
        if node.is_leaf:
            out[rows] = node.distribution()
            return
        go_left = X[rows, node.feature] <= node.threshold
        if go_left.any():
            self._route(node.left, X, rows[go_left], out)
        if not go_left.all():
            self._route(node.right, X, rows[~go_left], out)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)

    def depth(self) -> int:
        def walk(node):
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def n_leaves(self) -> int:
        def walk(node):
            return 1 if node.is_leaf else walk(node.left) + walk(node.right)
        return walk(self.root)

    def dump_lines(self) -> list[str]:
        """Line-oriented serialization (stable across runs for equal trees)."""
        lines: list[str] = []

        def walk(node, depth):
            pad = "  " * depth
            if node.is_leaf:
                lines.append(f"{pad}leaf {','.join(repr(c) for c in node.counts.tolist())}")
            else:
                lines.append(f"{pad}split f={node.feature} t={node.threshold!r}")
                walk(node.left, depth + 1)
                walk(node.right, depth + 1)

        walk(self.root, 0)
        return lines


def _xlogx(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    nz = v > 0
    out[nz] = v[nz] * np.log2(v[nz])
    return out


def _entropy(counts: np.ndarray, total) -> np.ndarray:
    """Entropy in bits of count rows; zero-total rows give 0."""
    p = counts / np.where(total == 0, 1, total)
    return -_xlogx(p).sum(axis=-1)


def _best_split_all_features(Xn, yn, k, min_leaf, parent_entropy):
    """Best (gain_ratio, column, threshold) over every column of a node's
    submatrix, or None.

    One vectorized sweep: all columns are sorted together and the cumulative
    class counts give the gain of every value-change boundary at once. Both
    children must have >= min_leaf rows. Gain ties resolve to the lowest
    column then the lowest threshold.
    """
    n, F = Xn.shape
    lo, hi = min_leaf - 1, n - min_leaf  # admissible boundary positions [lo, hi)
    if lo >= hi:
        return None
    order = np.argsort(Xn, axis=0, kind="stable")
    sv = np.take_along_axis(Xn, order, axis=0)
    sy = yn[order]  # n x F

    boundary = sv[lo:hi] != sv[lo + 1 : hi + 1]  # value changes only
    if not boundary.any():
        return None
    n_left = np.arange(lo + 1, hi + 1, dtype=np.float64)[:, None]
    n_right = n - n_left

    if k == 2:
        cum1 = np.cumsum(sy, axis=0)[lo:hi].astype(np.float64)
        h_left = (np.log2(n_left) * n_left - _xlogx(cum1) - _xlogx(n_left - cum1)) / n_left
        r1 = sy.sum(axis=0) - cum1
        h_right = (np.log2(n_right) * n_right - _xlogx(r1) - _xlogx(n_right - r1)) / n_right
    else:
        one_hot = np.zeros((n, F, k))
        one_hot[np.arange(n)[:, None], np.arange(F)[None, :], sy] = 1.0
        cum = one_hot.cumsum(axis=0)
        left = cum[lo:hi]
        right = cum[-1][None, :, :] - left
        h_left = (np.log2(n_left) * n_left - _xlogx(left).sum(axis=2)) / n_left
        h_right = (np.log2(n_right) * n_right - _xlogx(right).sum(axis=2)) / n_right

    # Information gain is non-negative by concavity; clamp fp noise to zero so
    # genuinely uninformative splits (XOR-style parity nodes) tie at exactly 0
    # and the deterministic tie-break still picks them in column/threshold order.
    gain = np.maximum(0.0, parent_entropy - (n_left * h_left + n_right * h_right) / n)
    pl = n_left / n
    split_info = -(pl * np.log2(pl) + (1.0 - pl) * np.log2(1.0 - pl))
    ratio = np.where(boundary, gain / split_info, -1.0)

    # Feature-major flattening makes argmax break ties toward the lowest
    # column first, then the lowest threshold.
    flat = np.argmax(ratio.T)
    col, pos = divmod(int(flat), ratio.shape[0])
    if ratio[pos, col] < 0:
        return None
    threshold = (sv[lo + pos, col] + sv[lo + pos + 1, col]) / 2.0
    return float(ratio[pos, col]), col, float(threshold)


class _Builder:
    def __init__(self, X, y, k, params: C45Params, candidates_fn):
        self.X = X
        self.y = y
        self.k = k
        self.params = params
        self.candidates_fn = candidates_fn

    def grow(self, rows: np.ndarray) -> TreeNode:
        y_node = self.y[rows]
        counts = np.bincount(y_node, minlength=self.k).astype(np.float64)
        node = TreeNode(counts=counts)
        n = len(y_node)
        if n < 2 * self.params.min_leaf or (counts > 0).sum() <= 1:
            return node

        parent_entropy = _entropy(counts, float(n))
        feats = self.candidates_fn()
        found = _best_split_all_features(
            self.X[np.ix_(rows, feats)], y_node, self.k, self.params.min_leaf, parent_entropy
        )
        if found is None:
            return node

        _, col, threshold = found
        feat = int(feats[col])
        go_left = self.X[rows, feat] <= threshold
        node.feature = feat
        node.threshold = threshold
        node.left = self.grow(rows[go_left])
        node.right = self.grow(rows[~go_left])
        return node


def _added_errors(n: float, e: float, cf: float) -> float:
    """C4.5's pessimistic estimate of extra errors on n cases with e observed."""
    if n == 0:
        return 0.0
    if e < 1e-9:
        return n * (1.0 - cf ** (1.0 / n))
    if e + 0.5 >= n:
        return max(0.0, n - e)
    z = norm.ppf(1.0 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * np.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1.0 + z * z / n
    )
    return r * n - e


def _prune(node: TreeNode, cf: float) -> float:
    """Bottom-up subtree replacement; returns the node's estimated errors."""
    n = node.counts.sum()
    e = n - node.counts.max()
    leaf_errors = e + _added_errors(n, e, cf)
    if node.is_leaf:
        return leaf_errors
    subtree_errors = _prune(node.left, cf) + _prune(node.right, cf)
    if leaf_errors <= subtree_errors + 0.1:
        node.left = node.right = None
        node.feature = -1
        return leaf_errors
    return subtree_errors


def c45_train(
    d: Dataset,
    params: C45Params = C45Params(),
    feature_mask=None,
    rng: np.random.Generator | None = None,
    n_candidates: int | None = None,
) -> DecisionTree:
    """Grow (and optionally prune) one tree.

    ``feature_mask`` restricts the usable features; ``n_candidates`` with an
    ``rng`` makes every node score a fresh uniform feature sample of that size
    (sampled indices are visited in sorted order so ties keep breaking toward
    the lowest feature index).
    """
    X = np.asarray(d.X, dtype=np.float64)
    if d.n_rows < 1:
        raise ValueError("need at least one training row")
    k = d.schema.num_classes
    allowed = np.arange(X.shape[1]) if feature_mask is None else np.sort(np.fromiter(feature_mask, dtype=np.int64))
    if n_candidates is not None and n_candidates < len(allowed):
        if rng is None:
            raise ValueError("per-node feature sampling needs an rng")

        def candidates_fn():
            return np.sort(rng.choice(allowed, size=n_candidates, replace=False))

    else:

        def candidates_fn():
            return allowed

    builder = _Builder(X, d.y, k, params, candidates_fn)
    root = builder.grow(np.arange(d.n_rows))
    if params.use_pruning:
        _prune(root, params.pruning_confidence)
    return DecisionTree(root=root, n_classes=k, n_features=X.shape[1])
