"""Classifier benchmarking with from-scratch learners and rank-based comparison statistics.

The package is organised as a plain numpy/scipy library:

* ``clfbench.data`` -- dataset loading (ARFF/CSV), nominal-to-binary encoding,
  train-fitted min/max normalization, stratified resampling and k-fold partitions.
* ``clfbench.pca`` -- dense symmetric eigensolver (cyclic Jacobi) and
  dimension-preserving PCA used by the rotation forest.
* ``clfbench.classifiers`` -- SMO support vector machines (linear / polynomial /
  RBF kernels, one-vs-one multiclass), C4.5 trees, random and rotation forests,
  multinomial logistic regression and 1-NN.
* ``clfbench.tuning`` -- grid-search hyperparameter selection by stratified
  cross-validation.
* ``clfbench.stats`` -- Friedman / Wilcoxon / sign / paired-t tests, Holm
  correction, clique formation and Texas-sharpshooter decision analysis.
* ``clfbench.experiment`` / ``clfbench.plots`` / ``clfbench.cli`` -- the
  resample-evaluate-compare harness, figure emission and command line front end.
"""

from clfbench.data import (
    Dataset,
    DatasetSchema,
    FeatureSpec,
    SplitPair,
    encode_nominal_to_binary,
    kfold_partition,
    load_dataset,
    normalize_fit_apply,
    stratified_resample,
)
from clfbench.classifiers import ClassifierSpec, accuracy, predict_label, train
from clfbench.tuning import ParamGrid, TuningResult, cross_val_accuracy, default_grid, grid_search
from clfbench.stats import (
    AccuracyMatrix,
    form_cliques,
    friedman_test,
    holm_adjust,
    mean_ranks,
    paired_t_test,
    sharpshooter,
    sign_test,
    wilcoxon_signed_rank,
)
from clfbench.experiment import ExperimentConfig, ResultStore, run_experiment

__version__ = "0.1.0"

__all__ = [
    "AccuracyMatrix",
    "ClassifierSpec",
    "Dataset",
    "DatasetSchema",
    "ExperimentConfig",
    "FeatureSpec",
    "ParamGrid",
    "ResultStore",
    "SplitPair",
    "TuningResult",
    "accuracy",
    "cross_val_accuracy",
    "default_grid",
    "encode_nominal_to_binary",
    "form_cliques",
    "friedman_test",
    "grid_search",
    "holm_adjust",
    "kfold_partition",
    "load_dataset",
    "mean_ranks",
    "normalize_fit_apply",
    "paired_t_test",
    "predict_label",
    "run_experiment",
    "sharpshooter",
    "sign_test",
    "stratified_resample",
    "train",
    "wilcoxon_signed_rank",
]
