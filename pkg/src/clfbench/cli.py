"""Command line front end.

Verbs::

    clfbench run <config.json> [--threads N]
    clfbench report <results.csv> [--alpha A] [--out DIR]
    clfbench cd <matrix.csv> [--alpha A] [--out DIR]
    clfbench sharpshooter <results.csv> --pair A,B [--out DIR]
    clfbench validate <config.json>

``run`` executes (or resumes) an experiment config; ``report`` turns a results
CSV into the accuracy matrix, Friedman test, Holm-corrected pairwise Wilcoxon
tests and a critical-difference diagram; ``cd`` draws the diagram straight
from an accuracy-matrix CSV; ``sharpshooter`` emits the decision-analysis plot
for one classifier pair. Exit status is 0 only when every requested artifact
completed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from clfbench.classifiers.base import ClassifierSpec, InvalidParamError
from clfbench.experiment import (
    ExperimentConfig,
    IncompleteResultsError,
    ResultStore,
    run_experiment,
    sharpshooter_points,
)
from clfbench.plots import emit_cd_diagram, emit_sharpshooter
from clfbench.stats import (
    AccuracyMatrix,
    form_cliques,
    friedman_test,
    mean_ranks,
    pairwise_wilcoxon_holm,
    sharpshooter,
)


def _rejection_matrix(classifiers, pairwise):
    k = len(classifiers)
    rejected = np.zeros((k, k), dtype=bool)
    index = {name: i for i, name in enumerate(classifiers)}
    for res in pairwise:
        i, j = index[res.pair[0]], index[res.pair[1]]
        rejected[i, j] = rejected[j, i] = res.rejected_at_alpha
    return rejected


def report_from_matrix(matrix: AccuracyMatrix, alpha: float, out_dir: Path, stem: str = "cd_diagram"):
    """Shared tail of `report` and `cd`: tests, cliques, diagram."""
    out_dir.mkdir(parents=True, exist_ok=True)
    ranks = mean_ranks(matrix)
    chi2, df, p = friedman_test(matrix)
    pairwise = pairwise_wilcoxon_holm(matrix, alpha)
    cliques = form_cliques(ranks, _rejection_matrix(matrix.classifiers, pairwise))
    svg = emit_cd_diagram(ranks, cliques, out_dir / f"{stem}.svg")

    print(f"Friedman chi2 = {chi2:.4f} (df={df}), p = {p:.6g}")
    for res in pairwise:
        flag = "REJECT" if res.rejected_at_alpha else "      "
        print(
            f"  {flag} {res.pair[0]} vs {res.pair[1]}: W={res.statistic:.1f} "
            f"raw p={res.raw_p:.4g} holm p={res.holm_adjusted_p:.4g}"
        )
    for cl in cliques.cliques:
        print("  clique: {" + ", ".join(matrix.classifiers[i] for i in cl) + "}")
    print(f"wrote {svg}, {svg.with_suffix('.txt')}, {svg.with_suffix('.csv')}")
    return ranks, cliques, pairwise


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    store = run_experiment(cfg, threads=args.threads)
    total = len(cfg.dataset_paths) * len(cfg.classifiers) * cfg.n_resamples
    print(f"{len(store)}/{total} records complete in {cfg.out_dir / 'results.csv'}")
    if store.failures:
        print(f"{len(store.failures)} task(s) failed; see {cfg.out_dir / 'failures.csv'}")
        return 1
    return 0


def cmd_report(args) -> int:
    store = ResultStore.load(args.results)
    if len(store) == 0:
        print(f"no records in {args.results}", file=sys.stderr)
        return 1
    matrix = store.to_accuracy_matrix()
    out_dir = Path(args.out or Path(args.results).parent)
    matrix.to_csv(out_dir / "accuracy_matrix.csv")
    report_from_matrix(matrix, args.alpha, out_dir)
    print(f"wrote {out_dir / 'accuracy_matrix.csv'}")
    return 0


def cmd_cd(args) -> int:
    matrix = AccuracyMatrix.from_csv(args.matrix)
    out_dir = Path(args.out or Path(args.matrix).parent)
    report_from_matrix(matrix, args.alpha, out_dir)
    return 0


def cmd_sharpshooter(args) -> int:
    name_a, _, name_b = args.pair.partition(",")
    if not name_b:
        print("--pair expects two comma-separated classifier ids", file=sys.stderr)
        return 2
    store = ResultStore.load(args.results)
    points = sharpshooter_points(store, name_a.strip(), name_b.strip())
    if not points:
        print(f"no usable ({name_a}, {name_b}) record pairs in {args.results}", file=sys.stderr)
        return 1
    counts, rate = sharpshooter(points)
    out_dir = Path(args.out or Path(args.results).parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    svg = emit_sharpshooter(points, out_dir / "sharpshooter.svg", name_a.strip(), name_b.strip())
    print(f"quadrants {counts}; correct decision rate {rate:.3f}")
    print(f"wrote {svg} and {svg.with_suffix('.csv')}")
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    problems = []
    for p in cfg.dataset_paths:
        if not Path(p).exists():
            problems.append(f"dataset file missing: {p}")
    for arm in cfg.classifiers:
        try:
            ClassifierSpec(family=arm.family, params={**arm.params})
            if arm.tuned:
                arm.resolved_grid()
        except (InvalidParamError, ValueError) as exc:
            problems.append(f"classifier {arm.name}: {exc}")
    for problem in problems:
        print(problem, file=sys.stderr)
    if problems:
        return 1
    print(
        f"config OK: {len(cfg.dataset_paths)} dataset(s) x {len(cfg.classifiers)} classifier(s) "
        f"x {cfg.n_resamples} resample(s), seed {cfg.master_seed}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clfbench", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run or resume an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--threads", type=int, default=None, help="worker cap (default: env or cpu count)")
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="statistics + CD diagram from a results CSV")
    p_report.add_argument("results")
    p_report.add_argument("--alpha", type=float, default=0.05)
    p_report.add_argument("--out", default=None)
    p_report.set_defaults(func=cmd_report)

    p_cd = sub.add_parser("cd", help="CD diagram from an accuracy-matrix CSV")
    p_cd.add_argument("matrix")
    p_cd.add_argument("--alpha", type=float, default=0.05)
    p_cd.add_argument("--out", default=None)
    p_cd.set_defaults(func=cmd_cd)

    p_sharp = sub.add_parser("sharpshooter", help="Texas-sharpshooter plot for a classifier pair")
    p_sharp.add_argument("results")
    p_sharp.add_argument("--pair", required=True, help="two classifier ids, e.g. rotation_forest,svm_rbf_tuned")
    p_sharp.add_argument("--out", default=None)
    p_sharp.set_defaults(func=cmd_sharpshooter)

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IncompleteResultsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
