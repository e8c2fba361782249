"""Grid-search hyperparameter tuning by stratified k-fold cross-validation.

One tuning run fixes a single fold partition from its seed and scores every
grid point on it, so points are comparable and can be evaluated in any order
(per-point model seeds are keyed by the point's content, not its position).
Ties at the maximum are broken uniformly at random with a seed derived from
the tuning seed, so the whole result is reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from clfbench.classifiers.base import ClassifierSpec, accuracy, train
from clfbench.data import Dataset, kfold_partition
from clfbench.seeding import derive_seed

GRID_FAMILIES = ("svm_rbf", "svm_linear", "svm_quadratic", "random_forest", "rotation_forest")

# 2^-16 .. 2^8, the shared exponent ladder for C and gamma.
POW2_RANGE = [float(2.0**e) for e in range(-16, 9)]

# 10, 50, 100, then hundreds up to 1000, then quarter steps to 2000: 16 sizes.
TREE_COUNTS = [10, 50] + list(range(100, 1001, 100)) + [1250, 1500, 1750, 2000]


def params_key(params: dict) -> str:
    """Canonical ``k1=v1;k2=v2`` encoding, keys sorted; used for seeds and CSV."""
    return ";".join(f"{k}={params[k]!r}" if isinstance(params[k], float) else f"{k}={params[k]}"
                    for k in sorted(params))


@dataclass(frozen=True)
class ParamGrid:
    family: str  # ClassifierSpec family of every point
    points: tuple  # tuple of param dicts

    def __post_init__(self):
        if not self.points:
            raise ValueError("empty grid")
        keys = [params_key(p) for p in self.points]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate grid points")


@dataclass(frozen=True)
class TuningResult:
    best_params: dict
    best_cv_accuracy: float
    per_point_cv_accuracy: tuple
    tie_set: tuple  # param dicts sharing the maximal score
    tie_break_seed: int


def default_grid(family: str) -> ParamGrid:
    """The benchmark's published search spaces.

    svm_rbf crosses C and gamma over the powers of two (625 points),
    svm_linear/svm_quadratic search C alone (25 points), and both forests
    search the 16-value tree-count ladder with their other parameters fixed
    (sqrt feature sampling; group size 3 and sample proportion 0.5).
    """
    if family == "svm_rbf":
        points = tuple(
            {"kernel": "rbf", "c": c, "gamma": g} for c in POW2_RANGE for g in POW2_RANGE
        )
    elif family == "svm_linear":
        points = tuple({"kernel": "linear", "c": c} for c in POW2_RANGE)
    elif family == "svm_quadratic":
        points = tuple({"kernel": "polynomial", "degree": 2, "c": c} for c in POW2_RANGE)
    elif family == "random_forest":
        points = tuple({"n_trees": n, "n_features": "sqrt"} for n in TREE_COUNTS)
    elif family == "rotation_forest":
        points = tuple(
            {"n_trees": n, "group_size": 3, "sample_proportion": 0.5} for n in TREE_COUNTS
        )
    else:
        raise ValueError(f"no default grid for {family!r} (know {GRID_FAMILIES})")
    base = "svm" if family.startswith("svm") else family
    return ParamGrid(family=base, points=points)


def grid_from_lists(family: str, value_lists: dict, base_params: dict | None = None) -> ParamGrid:
    """Cartesian product of explicit per-parameter value lists (config override)."""
    base = dict(base_params or {})
    names = sorted(value_lists)
    points = [dict(base)]
    for name in names:
        points = [{**p, name: v} for p in points for v in value_lists[name]]
    return ParamGrid(family=family, points=tuple(points))


def _cv_mean_accuracy(family: str, params: dict, folds, seed: int) -> float:
    spec = ClassifierSpec(family=family, params=params)
    point_key = params_key(params)
    accs = []
    for fold_idx, (tr, val) in enumerate(folds):
        model = train(spec, tr, seed=derive_seed(seed, "point", point_key, "fold", fold_idx))
        accs.append(accuracy(model, val))
    return float(np.mean(accs))


def cross_val_accuracy(spec: ClassifierSpec, d: Dataset, k: int = 10, seed: int = 0) -> float:
    """Mean validation accuracy over a stratified k-fold partition of ``d``."""
    folds = kfold_partition(d, k, derive_seed(seed, "folds"))
    return _cv_mean_accuracy(spec.family, spec.params, folds, seed)


def grid_search(grid: ParamGrid, d: Dataset, k: int = 10, seed: int = 0) -> TuningResult:
    """Score every grid point on one shared fold partition and pick the best.

    Exact score ties form the tie set, from which the winner is drawn
    uniformly using a seed derived from the tuning seed.
    """
    folds = kfold_partition(d, k, derive_seed(seed, "folds"))
    scores = tuple(_cv_mean_accuracy(grid.family, p, folds, seed) for p in grid.points)
    best = max(scores)
    tie_set = tuple(p for p, s in zip(grid.points, scores) if s == best)
    tie_break_seed = derive_seed(seed, "tiebreak")
    rng = np.random.default_rng(tie_break_seed)
    chosen = tie_set[int(rng.integers(len(tie_set)))]
    return TuningResult(
        best_params=dict(chosen),
        best_cv_accuracy=best,
        per_point_cv_accuracy=scores,
        tie_set=tie_set,
        tie_break_seed=tie_break_seed,
    )
