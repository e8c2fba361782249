"""From-scratch classifiers behind a uniform train/predict/evaluate contract."""

from clfbench.classifiers.base import (
    ClassifierSpec,
    EvalRecord,
    InvalidParamError,
    accuracy,
    default_params,
    predict_label,
    train,
)
from clfbench.classifiers.svm import (
    BinarySvmModel,
    ConvergenceError,
    KernelSpec,
    PairwiseSvmModel,
    SmoParams,
    kernel_eval,
    pairwise_predict,
    pairwise_train,
    smo_train_binary,
)
from clfbench.classifiers.baselines import (
    LogisticModel,
    LogisticParams,
    logistic_train,
    nn1_predict,
)
from clfbench.classifiers.tree import C45Params, DecisionTree, c45_train
from clfbench.classifiers.forests import (
    RandomForestModel,
    RandomForestParams,
    RotationForestModel,
    RotationForestParams,
    forest_predict,
    resolve_n_features,
    rf_train,
    rot_train,
)

__all__ = [
    "BinarySvmModel",
    "C45Params",
    "ClassifierSpec",
    "ConvergenceError",
    "DecisionTree",
    "EvalRecord",
    "InvalidParamError",
    "KernelSpec",
    "LogisticModel",
    "LogisticParams",
    "PairwiseSvmModel",
    "RandomForestModel",
    "RandomForestParams",
    "RotationForestModel",
    "RotationForestParams",
    "SmoParams",
    "accuracy",
    "c45_train",
    "default_params",
    "forest_predict",
    "kernel_eval",
    "logistic_train",
    "nn1_predict",
    "pairwise_predict",
    "pairwise_train",
    "predict_label",
    "resolve_n_features",
    "rf_train",
    "rot_train",
    "smo_train_binary",
    "train",
]
