"""Experiment orchestration: resample, tune, train, evaluate, persist, resume.

One task = (dataset, classifier, resample). Each task derives every seed it
needs from (master seed, dataset id, resample id, classifier id), so tasks can
run on any number of workers in any order and still produce the same records.
Completed records stream to ``results.csv`` in the output directory as they
finish; on success the file is rewritten sorted by key, so re-running a
finished or interrupted experiment yields the same canonical file (wall-clock
``train_time_ms`` excepted) and trains nothing that is already recorded.

Results CSV schema (one line per record)::

    dataset,classifier,resample_id,test_accuracy,train_cv_accuracy,params,train_time_ms

with accuracies printed to 6 decimal places and params as ``k1=v1;k2=v2``
sorted by key.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from clfbench.classifiers.base import ClassifierSpec, EvalRecord, accuracy, default_params, train
from clfbench.data import Dataset, encode_nominal_to_binary, load_dataset, normalize_fit_apply, stratified_resample
from clfbench.seeding import derive_seed
from clfbench.stats import AccuracyMatrix
from clfbench.tuning import ParamGrid, cross_val_accuracy, default_grid, grid_from_lists, grid_search, params_key

THREADS_ENV_VAR = "CLFBENCH_THREADS"
RESULTS_HEADER = "dataset,classifier,resample_id,test_accuracy,train_cv_accuracy,params,train_time_ms"


class IncompleteResultsError(RuntimeError):
    pass


@dataclass(frozen=True)
class ClassifierArm:
    """One benchmark arm: a family, fixed params, and optionally a tuning grid."""

    name: str
    family: str
    tuned: bool = False
    params: dict = field(default_factory=dict)
    grid: ParamGrid | None = None

    def resolved_grid(self) -> ParamGrid:
        if self.grid is not None:
            return self.grid
        if self.family == "svm":
            kernel = self.params.get("kernel", "rbf")
            return default_grid(f"svm_{'quadratic' if kernel == 'polynomial' else kernel}")
        return default_grid(self.family)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_paths: tuple
    classifiers: tuple  # ClassifierArm
    n_resamples: int = 30
    train_fraction: float = 0.5
    cv_folds: int = 10
    master_seed: int = 0
    alpha: float = 0.05
    out_dir: Path = Path("results")

    def __post_init__(self):
        if self.n_resamples < 1:
            raise ValueError("n_resamples must be >= 1")
        names = [c.name for c in self.classifiers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate classifier names in config: {names}")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        """Load the flat JSON config format (see README for the key list)."""
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        arms = []
        for c in raw["classifiers"]:
            family = c["family"]
            params = dict(c.get("params", {}))
            tuned = bool(c.get("tuned", False))
            name = c.get("name") or _default_arm_name(family, params, tuned)
            grid = None
            if "grid" in c and c["grid"]:
                grid = grid_from_lists(family, c["grid"], base_params=params)
            arms.append(ClassifierArm(name=name, family=family, tuned=tuned, params=params, grid=grid))
        return cls(
            dataset_paths=tuple(raw["datasets"]),
            classifiers=tuple(arms),
            n_resamples=int(raw.get("resamples", 30)),
            train_fraction=float(raw.get("train_fraction", 0.5)),
            cv_folds=int(raw.get("cv_folds", 10)),
            master_seed=int(raw.get("seed", 0)),
            alpha=float(raw.get("alpha", 0.05)),
            out_dir=Path(raw.get("out_dir", "results")),
        )


def _default_arm_name(family: str, params: dict, tuned: bool) -> str:
    name = family
    if family == "svm":
        name = f"svm_{params.get('kernel', 'rbf')}"
    return name + ("_tuned" if tuned else "")


def _format_record(r: EvalRecord) -> str:
    return (
        f"{r.dataset_id},{r.classifier_id},{r.resample_id},"
        f"{r.test_accuracy:.6f},{r.train_cv_accuracy:.6f},"
        f"{params_key(r.chosen_params)},{r.train_time_ms}"
    )


def _parse_record(line: str) -> EvalRecord:
    parts = line.rstrip("\n").split(",")
    if len(parts) < 7:
        raise ValueError(f"malformed results line: {line!r}")
    # params may contain no commas (key=val;key=val), so field count is fixed
    dataset, classifier, resample, test_acc, cv_acc = parts[:5]
    train_time = parts[-1]
    params_str = ",".join(parts[5:-1])
    params: dict = {}
    if params_str:
        for item in params_str.split(";"):
            key, val = item.split("=", 1)
            params[key] = _parse_value(val)
    return EvalRecord(
        dataset_id=dataset,
        classifier_id=classifier,
        resample_id=int(resample),
        test_accuracy=float(test_acc),
        train_cv_accuracy=float(cv_acc),
        chosen_params=params,
        train_time_ms=int(train_time),
    )


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


class ResultStore:
    """Append-only records keyed by (dataset, classifier, resample)."""

    def __init__(self):
        self._records: dict[tuple, EvalRecord] = {}
        self.failures: dict[tuple, str] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key) -> bool:
        return key in self._records

    def add(self, record: EvalRecord) -> None:
        key = (record.dataset_id, record.classifier_id, record.resample_id)
        with self._lock:
            if key in self._records:
                raise ValueError(f"duplicate record for {key}")
            self._records[key] = record

    def records(self) -> list[EvalRecord]:
        return [self._records[k] for k in sorted(self._records)]

    @classmethod
    def load(cls, path) -> "ResultStore":
        store = cls()
        path = Path(path)
        if not path.exists():
            return store
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line == RESULTS_HEADER:
                    continue
                store.add(_parse_record(line))
        return store

    def save(self, path) -> None:
        """Canonical form: header plus records sorted by key."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(RESULTS_HEADER + "\n")
            for record in self.records():
                fh.write(_format_record(record) + "\n")
        os.replace(tmp, path)

    def to_accuracy_matrix(self, expected_resamples: int | None = None) -> AccuracyMatrix:
        """Mean test accuracy per (dataset, classifier).

        With ``expected_resamples`` the store must hold exactly that many
        records for every key; otherwise any present records are averaged but
        every (dataset, classifier) must have at least one.
        """
        datasets = sorted({k[0] for k in self._records})
        classifiers = sorted({k[1] for k in self._records})
        cells = np.zeros((len(datasets), len(classifiers)))
        for i, ds in enumerate(datasets):
            for j, clf in enumerate(classifiers):
                accs = [
                    r.test_accuracy
                    for (d, c, _), r in self._records.items()
                    if d == ds and c == clf
                ]
                if not accs:
                    raise IncompleteResultsError(f"no results for ({ds}, {clf})")
                if expected_resamples is not None and len(accs) != expected_resamples:
                    raise IncompleteResultsError(
                        f"({ds}, {clf}) has {len(accs)} resamples, expected {expected_resamples}"
                    )
                cells[i, j] = float(np.mean(accs))
        return AccuracyMatrix(tuple(datasets), tuple(classifiers), cells)


def prepare_dataset(path) -> Dataset:
    """Load and binary-encode one dataset (the schema-level half of the
    preprocessing pipeline; normalization happens per split)."""
    return encode_nominal_to_binary(load_dataset(path))


def run_task(dataset: Dataset, arm: ClassifierArm, resample_id: int, cfg: ExperimentConfig) -> EvalRecord:
    """Evaluate one (dataset, classifier, resample) cell of the experiment."""
    split = stratified_resample(dataset, resample_id, cfg.master_seed, cfg.train_fraction)
    train_n, test_n, _ = normalize_fit_apply(split.train, split.test)

    tune_seed = derive_seed(cfg.master_seed, dataset.dataset_id, resample_id, arm.name, "tuning")
    if arm.tuned:
        result = grid_search(arm.resolved_grid(), train_n, k=cfg.cv_folds, seed=tune_seed)
        chosen = {**arm.params, **result.best_params}
        cv_accuracy = result.best_cv_accuracy
    else:
        chosen = {**default_params(arm.family), **arm.params}
        spec = ClassifierSpec(family=arm.family, params=chosen)
        cv_accuracy = cross_val_accuracy(spec, train_n, k=cfg.cv_folds, seed=tune_seed)

    spec = ClassifierSpec(family=arm.family, params=chosen)
    model_seed = derive_seed(cfg.master_seed, dataset.dataset_id, resample_id, arm.name, "train")
    started = time.perf_counter()
    model = train(spec, train_n, seed=model_seed)
    train_ms = int(round((time.perf_counter() - started) * 1000))
    test_accuracy = accuracy(model, test_n)

    return EvalRecord(
        dataset_id=dataset.dataset_id,
        classifier_id=arm.name,
        resample_id=resample_id,
        test_accuracy=test_accuracy,
        train_cv_accuracy=cv_accuracy,
        chosen_params=chosen,
        train_time_ms=train_ms,
    )


def default_thread_count() -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run_experiment(
    cfg: ExperimentConfig,
    threads: int | None = None,
    max_tasks: int | None = None,
) -> ResultStore:
    """Run (and/or resume) the full experiment grid.

    Records already present in ``<out_dir>/results.csv`` are kept and their
    tasks skipped. Individual task failures are recorded, excluded from the
    store, and only escalated at the end if some (dataset, classifier) pair
    produced no successful resample at all. ``max_tasks`` stops after that
    many completed tasks (used to exercise interruption/resume).
    """
    threads = threads or default_thread_count()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.csv"
    store = ResultStore.load(results_path)

    datasets = [prepare_dataset(p) for p in cfg.dataset_paths]
    tasks = [
        (ds, arm, r)
        for ds in datasets
        for arm in cfg.classifiers
        for r in range(cfg.n_resamples)
        if (ds.dataset_id, arm.name, r) not in store
    ]
    if max_tasks is not None:
        tasks = tasks[:max_tasks]

    append_lock = threading.Lock()
    with open(results_path, "a", encoding="utf-8") as live:

        def worker(ds, arm, r):
            record = run_task(ds, arm, r, cfg)
            store.add(record)
            with append_lock:
                live.write(_format_record(record) + "\n")
                live.flush()
            return record

        if threads <= 1:
            for ds, arm, r in tasks:
                try:
                    worker(ds, arm, r)
                except Exception as exc:  # isolate task failures
                    store.failures[(ds.dataset_id, arm.name, r)] = repr(exc)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = {
                    pool.submit(worker, ds, arm, r): (ds.dataset_id, arm.name, r)
                    for ds, arm, r in tasks
                }
                for fut in as_completed(futures):
                    try:
                        fut.result()
                    except Exception as exc:
                        store.failures[futures[fut]] = repr(exc)

    store.save(results_path)
    if store.failures:
        failures_path = out_dir / "failures.csv"
        with open(failures_path, "w", encoding="utf-8") as fh:
            fh.write("dataset,classifier,resample_id,error\n")
            for (d, c, r), err in sorted(store.failures.items()):
                fh.write(f"{d},{c},{r},{err.replace(',', ';')}\n")

    if max_tasks is None:
        for ds in datasets:
            for arm in cfg.classifiers:
                if not any(
                    (ds.dataset_id, arm.name, r) in store for r in range(cfg.n_resamples)
                ):
                    raise IncompleteResultsError(
                        f"every resample of ({ds.dataset_id}, {arm.name}) failed; "
                        f"see {out_dir / 'failures.csv'}"
                    )
    return store


def sharpshooter_points(store: ResultStore, classifier_a: str, classifier_b: str):
    """(train-CV ratio, test ratio) of A over B per (dataset, resample).

    Pairs where any of the four accuracies is zero cannot form a positive
    ratio and are skipped.
    """
    by_key: dict[tuple, dict[str, EvalRecord]] = {}
    for r in store.records():
        if r.classifier_id in (classifier_a, classifier_b):
            by_key.setdefault((r.dataset_id, r.resample_id), {})[r.classifier_id] = r
    points = []
    for key in sorted(by_key):
        pair = by_key[key]
        if len(pair) != 2:
            continue
        ra, rb = pair[classifier_a], pair[classifier_b]
        if min(ra.test_accuracy, rb.test_accuracy, ra.train_cv_accuracy, rb.train_cv_accuracy) <= 0:
            continue
        points.append(
            (ra.train_cv_accuracy / rb.train_cv_accuracy, ra.test_accuracy / rb.test_accuracy)
        )
    return points
