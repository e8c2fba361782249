"""Uniform train/predict/evaluate contract over all classifier families.

A :class:`ClassifierSpec` names a family plus hyperparameters; :func:`train`
dispatches to the family trainer and returns a model object exposing
``predict_proba_matrix(X) -> (n, k)`` and ``predict(X) -> labels``. Class
distributions are plain numpy rows that are non-negative and sum to one;
``predict_label`` is the argmax with ties going to the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from clfbench.classifiers.baselines import LogisticParams, Nn1Model, logistic_train
from clfbench.classifiers.forests import (
    RandomForestParams,
    RotationForestParams,
    rf_train,
    rot_train,
)
from clfbench.classifiers.svm import KernelSpec, SmoParams, pairwise_train
from clfbench.data import Dataset
from clfbench.seeding import derive_seed

FAMILIES = ("svm", "random_forest", "rotation_forest", "logistic", "nn1")

_ALLOWED_PARAMS = {
    "svm": {"kernel", "c", "gamma", "degree"},
    "random_forest": {"n_trees", "n_features"},
    "rotation_forest": {"n_trees", "group_size", "sample_proportion"},
    "logistic": {"ridge", "max_newton_iters", "gradient_tolerance"},
    "nn1": set(),
}


class InvalidParamError(ValueError):
    pass


def default_params(family: str) -> dict:
    """WEKA-flavoured defaults used for the untuned arms of the benchmark."""
    if family == "svm":
        return {"kernel": "rbf", "c": 1.0, "gamma": 0.01}
    if family == "random_forest":
        return {"n_trees": 10, "n_features": "log2plus1"}
    if family == "rotation_forest":
        return {"n_trees": 10, "group_size": 3, "sample_proportion": 0.5}
    if family == "logistic":
        return {"ridge": 1e-8}
    if family == "nn1":
        return {}
    raise InvalidParamError(f"unknown classifier family {family!r}")


@dataclass(frozen=True)
class ClassifierSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParamError(f"unknown classifier family {self.family!r}")
        unknown = set(self.params) - _ALLOWED_PARAMS[self.family]
        if unknown:
            raise InvalidParamError(f"{self.family} does not take parameters {sorted(unknown)}")


@dataclass(frozen=True)
class EvalRecord:
    """One (dataset, classifier, resample) evaluation outcome."""

    dataset_id: str
    classifier_id: str
    resample_id: int
    test_accuracy: float
    train_cv_accuracy: float
    chosen_params: dict
    train_time_ms: int

    def __post_init__(self):
        if not (0.0 <= self.test_accuracy <= 1.0 and 0.0 <= self.train_cv_accuracy <= 1.0):
            raise ValueError("accuracies must lie in [0, 1]")


def _positive(params: dict, key: str, value):
    if not value > 0:
        raise InvalidParamError(f"parameter {key}={value!r} must be positive")
    return value


def train(spec: ClassifierSpec, train_data: Dataset, seed: int):
    """Train one model; deterministic given (spec, data, seed)."""
    p = spec.params
    if spec.family == "svm":
        kind = p.get("kernel", "rbf")
        try:
            kernel = KernelSpec(
                kind=kind,
                degree=int(p.get("degree", 2)),
                gamma=float(p.get("gamma", 0.01)),
            )
            smo = SmoParams(c=_positive(p, "c", float(p.get("c", 1.0))))
        except ValueError as exc:
            raise InvalidParamError(str(exc)) from exc
        return pairwise_train(train_data, kernel, smo, seed=seed)
    if spec.family == "random_forest":
        try:
            params = RandomForestParams(
                n_trees=int(p.get("n_trees", 10)), n_features=p.get("n_features", "sqrt")
            )
        except ValueError as exc:
            raise InvalidParamError(str(exc)) from exc
        return rf_train(train_data, params, seed=seed)
    if spec.family == "rotation_forest":
        try:
            params = RotationForestParams(
                n_trees=int(p.get("n_trees", 10)),
                group_size=int(p.get("group_size", 3)),
                sample_proportion=float(p.get("sample_proportion", 0.5)),
            )
        except ValueError as exc:
            raise InvalidParamError(str(exc)) from exc
        return rot_train(train_data, params, seed=seed)
    if spec.family == "logistic":
        try:
            params = LogisticParams(
                ridge=float(p.get("ridge", 1e-8)),
                max_newton_iters=int(p.get("max_newton_iters", 200)),
                gradient_tolerance=float(p.get("gradient_tolerance", 1e-8)),
            )
        except ValueError as exc:
            raise InvalidParamError(str(exc)) from exc
        return logistic_train(train_data, params)
    if spec.family == "nn1":
        return Nn1Model(
            X=np.asarray(train_data.X, dtype=np.float64).copy(),
            y=train_data.y.copy(),
            n_classes=train_data.schema.num_classes,
        )
    raise InvalidParamError(f"unknown classifier family {spec.family!r}")


def predict_label(model, x: np.ndarray) -> int:
    """Argmax of the model's class distribution; ties -> lowest class index."""
    dist = model.predict_proba_matrix(np.atleast_2d(np.asarray(x, dtype=np.float64)))[0]
    return int(np.argmax(dist))


def accuracy(model, d: Dataset) -> float:
    """Fraction of rows whose predicted label matches."""
    if d.n_rows == 0:
        raise ValueError("cannot score an empty dataset")
    pred = model.predict(np.asarray(d.X, dtype=np.float64))
    return float(np.mean(pred == d.y))


def model_seed(master_seed: int, dataset_id: str, resample_id: int, classifier_id: str) -> int:
    """Final-model training seed for one harness task."""
    return derive_seed(master_seed, dataset_id, resample_id, classifier_id, "train")
