"""Random forest and rotation forest ensembles over the C4.5 tree builder.

Random forest: each tree sees a bootstrap sample (n draws with replacement)
and scores a fresh uniform feature sample at every node; trees are unpruned
and grown to purity. Prediction averages the per-tree leaf distributions.

Rotation forest, per tree: shuffle the feature indices and cut them into
``ceil(m / f)`` groups (the last may be smaller); for every group draw a
non-empty random subset of the classes present, sample a proportion ``p`` of
those rows without replacement, fit a PCA on the sampled rows' group columns
and rotate ALL training rows' group columns by it; train a pruned C4.5 tree
on the rotated matrix. Prediction rotates the query the same way per tree and
averages the leaf distributions.

Every tree draws its randomness from an independent substream of the ensemble
seed, so tree i is identical whether the ensemble has i+1 or 1000 trees and
regardless of build order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from clfbench.classifiers.tree import C45Params, DecisionTree, c45_train
from clfbench.data import Dataset, from_arrays
from clfbench.pca import DegeneratePcaError, PcaModel, pca_fit, pca_transform
from clfbench.seeding import rng_from


@dataclass(frozen=True)
class RandomForestParams:
    n_trees: int = 10
    n_features: int | str = "sqrt"  # "sqrt" | "log2plus1" | explicit int

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if isinstance(self.n_features, str) and self.n_features not in ("sqrt", "log2plus1"):
            raise ValueError(f"unknown n_features mode {self.n_features!r}")


@dataclass(frozen=True)
class RotationForestParams:
    n_trees: int = 10  # r
    group_size: int = 3  # f, features per PCA subset
    sample_proportion: float = 0.5  # p

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.group_size < 1:
            raise ValueError(f"group_size must be >= 1, got {self.group_size}")
        if not 0.0 < self.sample_proportion <= 1.0:
            raise ValueError(f"sample_proportion must be in (0,1], got {self.sample_proportion}")


def resolve_n_features(mode, m: int) -> int:
    """Per-node candidate count: floor(sqrt(m)), floor(log2(m+1)) or explicit."""
    if mode == "sqrt":
        return max(1, int(math.isqrt(m)))
    if mode == "log2plus1":
        return max(1, int(math.log2(m + 1)))
    n = int(mode)
    if not 1 <= n <= m:
        raise ValueError(f"n_features {n} outside [1, {m}]")
    return n


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[DecisionTree, ...]
    n_classes: int
    n_features: int

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.zeros((len(X), self.n_classes))
        for t in self.trees:
            out += t.predict_proba_matrix(X)
        return out / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)

    def dump_lines(self) -> list[str]:
        lines = [f"random_forest trees={len(self.trees)}"]
        for i, t in enumerate(self.trees):
            lines.append(f"tree {i}")
            lines.extend(t.dump_lines())
        return lines


def rf_train(d: Dataset, p: RandomForestParams, seed: int, bootstrap: bool = True) -> RandomForestModel:
    """Bootstrap-aggregated random trees (``bootstrap=False`` is a test hook
    that trains every tree on the full data)."""
    X = np.asarray(d.X, dtype=np.float64)
    m = X.shape[1]
    n_feat = resolve_n_features(p.n_features, m)
    tree_params = C45Params(min_leaf=1, use_pruning=False)
    trees = []
    for i in range(p.n_trees):
        rng = rng_from(seed, "tree", i)
        if bootstrap:
            rows = np.sort(rng.integers(0, d.n_rows, size=d.n_rows))
            sample = d.subset(rows)
        else:
            sample = d
        trees.append(
            c45_train(sample, tree_params, rng=rng, n_candidates=n_feat)
        )
    return RandomForestModel(trees=tuple(trees), n_classes=d.schema.num_classes, n_features=m)


@dataclass(frozen=True)
class RotationTree:
    groups: tuple[np.ndarray, ...]  # feature-index groups, disjoint cover of 0..m-1
    pcas: tuple[PcaModel, ...]
    tree: DecisionTree

    def rotate(self, X: np.ndarray) -> np.ndarray:
        out = np.array(X, dtype=np.float64, copy=True)
        for group, pca in zip(self.groups, self.pcas):
            out[:, group] = pca_transform(pca, X[:, group])
        return out


@dataclass(frozen=True)
class RotationForestModel:
    trees: tuple[RotationTree, ...]
    n_classes: int
    n_features: int

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"instance arity {X.shape[1]} != training arity {self.n_features}")
        out = np.zeros((len(X), self.n_classes))
        for rt in self.trees:
            out += rt.tree.predict_proba_matrix(rt.rotate(X))
        return out / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)

    def dump_lines(self) -> list[str]:
        lines = [f"rotation_forest trees={len(self.trees)}"]
        for i, rt in enumerate(self.trees):
            lines.append(f"tree {i}")
            lines.append("groups " + "|".join(",".join(map(str, g.tolist())) for g in rt.groups))
            for j, pca in enumerate(rt.pcas):
                lines.append(f"group {j} means " + ",".join(repr(v) for v in pca.means.tolist()))
                lines.append(
                    f"group {j} components "
                    + ";".join(",".join(repr(v) for v in row) for row in pca.components.tolist())
                )
            lines.extend(rt.tree.dump_lines())
        return lines


def _is_degenerate(rows: np.ndarray) -> bool:
    return rows.shape[0] < 2 or bool(np.all(np.ptp(rows, axis=0) == 0))


def _fit_group_pca(X, group, sample_rows) -> PcaModel:
    """PCA of the sampled rows' group columns, with the spec'd fallback chain:
    refit on all rows when the sample is degenerate, identity if still so."""
    sub = X[np.ix_(sample_rows, group)]
    if not _is_degenerate(sub):
        return pca_fit(sub)
    full = X[:, group]
    if not _is_degenerate(full):
        return pca_fit(full)
    return PcaModel.identity(len(group))


def rot_train(
    d: Dataset,
    p: RotationForestParams,
    c45: C45Params = C45Params(),
    seed: int = 0,
    _force_all_classes: bool = False,
) -> RotationForestModel:
    """Rotation forest over pruned C4.5 trees.

    ``_force_all_classes`` is a test hook that skips the random class
    subsetting (every group then samples from the full row set).
    """
    X = np.asarray(d.X, dtype=np.float64)
    if X.dtype != np.float64:
        raise ValueError("rotation forest needs encoded numeric data")
    if d.n_rows < 2:
        raise ValueError("rotation forest needs at least 2 rows")
    m = X.shape[1]
    present = np.unique(d.y)

    trees = []
    for i in range(p.n_trees):
        rng = rng_from(seed, "tree", i)
        perm = rng.permutation(m)
        k = math.ceil(m / p.group_size)
        # Groups are sets; sorting inside each group gives a canonical column
        # layout (and makes the f=m case collapse to plain PCA exactly).
        groups = [np.sort(perm[j * p.group_size : (j + 1) * p.group_size]) for j in range(k)]

        pcas = []
        rotated = np.array(X, copy=True)
        for group in groups:
            if _force_all_classes:
                candidates = np.arange(d.n_rows)
            else:
                while True:  # redraw until at least one class is included
                    include = rng.random(len(present)) < 0.5
                    if include.any():
                        break
                candidates = np.flatnonzero(np.isin(d.y, present[include]))
            n_draw = min(len(candidates), max(2, math.ceil(p.sample_proportion * len(candidates))))
            sample_rows = np.sort(rng.choice(candidates, size=n_draw, replace=False))
            pca = _fit_group_pca(X, group, sample_rows)
            pcas.append(pca)
            rotated[:, group] = pca_transform(pca, X[:, group])

        rotated_ds = from_arrays(
            f"{d.dataset_id}#rot{i}", rotated, d.y, class_values=d.schema.class_values
        )
        tree = c45_train(rotated_ds, c45)
        trees.append(RotationTree(groups=tuple(groups), pcas=tuple(pcas), tree=tree))

    return RotationForestModel(trees=tuple(trees), n_classes=d.schema.num_classes, n_features=m)


def forest_predict(model, x: np.ndarray) -> np.ndarray:
    """Mean of the per-tree class distributions for one instance."""
    return model.predict_proba_matrix(np.atleast_2d(x))[0]
