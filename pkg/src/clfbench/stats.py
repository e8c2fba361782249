"""Hypothesis tests and decision analyses for comparing classifiers.

The cross-dataset protocol: rank classifiers per dataset (rank 1 = most
accurate, ties averaged), test the rank dispersion with the Friedman
chi-square, compare all classifier pairs with Wilcoxon signed-rank tests,
apply the Holm step-down correction, and group the classifiers into cliques
(maximal contiguous runs of the rank ordering with no rejected pair inside).

The Wilcoxon two-sided p is exact for up to 25 non-zero differences (the full
sign-assignment distribution, counted by dynamic programming over the integer
doubled-rank sums) and a tie-corrected, continuity-corrected normal
approximation beyond. The sign test is exact binomial throughout.

The Texas-sharpshooter analysis classifies (train-CV ratio, test ratio)
points into the four predicted-vs-observed quadrants; a ratio of exactly 1
counts as "no gain" on its axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import norm, rankdata
from scipy.stats import t as t_dist

WILCOXON_EXACT_LIMIT = 25


@dataclass(frozen=True)
class AccuracyMatrix:
    """Datasets x classifiers mean accuracies; complete, values in [0, 1]."""

    datasets: tuple[str, ...]
    classifiers: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.float64)
        if cells.shape != (len(self.datasets), len(self.classifiers)):
            raise ValueError(
                f"cells shape {cells.shape} != ({len(self.datasets)}, {len(self.classifiers)})"
            )
        if not np.isfinite(cells).all():
            raise ValueError("accuracy matrix has missing or non-finite cells")
        if cells.size and (cells.min() < 0 or cells.max() > 1):
            raise ValueError("accuracies must lie in [0, 1]")

    def column(self, classifier: str) -> np.ndarray:
        return self.cells[:, self.classifiers.index(classifier)]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("dataset," + ",".join(self.classifiers) + "\n")
            for name, row in zip(self.datasets, self.cells):
                fh.write(name + "," + ",".join(f"{v:.6f}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "AccuracyMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        header = lines[0].split(",")
        if header[0] != "dataset" or len(header) < 3:
            raise ValueError("expected header 'dataset,<classifier ids...>' with >= 2 classifiers")
        datasets, rows = [], []
        for ln in lines[1:]:
            parts = ln.split(",")
            datasets.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
        return cls(tuple(datasets), tuple(header[1:]), np.array(rows))


@dataclass(frozen=True)
class RankSummary:
    classifiers: tuple[str, ...]
    mean_ranks: np.ndarray  # rank 1 = best


def mean_ranks(m: AccuracyMatrix) -> RankSummary:
    """Per-dataset descending-accuracy ranks (ties averaged), averaged over datasets."""
    ranks = np.vstack([rankdata(-row, method="average") for row in m.cells])
    return RankSummary(classifiers=m.classifiers, mean_ranks=ranks.mean(axis=0))


def friedman_test(m: AccuracyMatrix) -> tuple[float, int, float]:
    """Friedman rank chi-square over the matrix: (chi2, df, p)."""
    n, k = m.cells.shape
    if k < 2 or n < 2:
        raise ValueError(f"need >= 2 classifiers and >= 2 datasets, got {k} x {n}")
    mean_r = mean_ranks(m).mean_ranks
    chi2 = 12.0 * n / (k * (k + 1)) * float(((mean_r - (k + 1) / 2.0) ** 2).sum())
    df = k - 1
    return chi2, df, float(chi2_dist.sf(chi2, df))


@dataclass(frozen=True)
class WilcoxonResult:
    w: float  # min(W+, W-)
    p: float
    w_plus: float
    w_minus: float
    n_effective: int  # non-zero differences used
    no_information: bool = False
    exact: bool = True


def _exact_tail_count(doubled_ranks: np.ndarray, w2: int) -> int:
    """Number of sign assignments with doubled W+ <= w2 (subset-sum DP)."""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        counts[r:] = counts[r:] + counts[:-r]
    return int(counts[: w2 + 1].sum())


def wilcoxon_signed_rank(a, b) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test of paired vectors.

    Zero differences are discarded (Wilcoxon's original treatment); remaining
    absolute differences are ranked with average ranks for ties.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
        raise ValueError("need two equal-length vectors with at least one pair")
    diff = a - b
    diff = diff[diff != 0.0]
    n = len(diff)
    if n == 0:
        return WilcoxonResult(w=0.0, p=1.0, w_plus=0.0, w_minus=0.0, n_effective=0,
                              no_information=True)

    ranks = rankdata(np.abs(diff), method="average")
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    w = min(w_plus, w_minus)

    if n <= WILCOXON_EXACT_LIMIT:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        w2 = int(round(2.0 * w))
        tail = _exact_tail_count(doubled, w2)
        p = min(1.0, 2.0 * tail / float(2**n))
        return WilcoxonResult(w=w, p=p, w_plus=w_plus, w_minus=w_minus, n_effective=n)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(diff), return_counts=True)
    var -= float((tie_counts**3 - tie_counts).sum()) / 48.0
    if var <= 0:
        return WilcoxonResult(w=w, p=1.0, w_plus=w_plus, w_minus=w_minus, n_effective=n,
                              exact=False)
    z = (w + 0.5 - mean) / math.sqrt(var)  # 0.5 continuity correction toward the mean
    p = min(1.0, 2.0 * float(norm.cdf(z)))
    return WilcoxonResult(w=w, p=p, w_plus=w_plus, w_minus=w_minus, n_effective=n, exact=False)


def sign_test(a, b) -> float:
    """Exact two-sided binomial sign test on the non-tied pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("need two equal-length vectors")
    wins = int((a > b).sum())
    losses = int((a < b).sum())
    n = wins + losses
    if n == 0:
        return 1.0
    x = min(wins, losses)
    tail = sum(math.comb(n, i) for i in range(x + 1))
    return min(1.0, 2.0 * tail / 2**n)


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    degenerate: bool = False


def paired_t_test(a, b) -> TTestResult:
    """Standard paired t test with df = n-1.

    Zero-variance differences are a degenerate case: p = 0 if the means
    differ, 1 otherwise.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("need two equal-length vectors with at least two pairs")
    diff = a - b
    n = len(diff)
    sd = float(diff.std(ddof=1))
    mean = float(diff.mean())
    if sd == 0.0:
        return TTestResult(t=math.inf if mean > 0 else (-math.inf if mean < 0 else 0.0),
                           p=0.0 if mean != 0.0 else 1.0, degenerate=True)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, p=2.0 * float(t_dist.sf(abs(t), n - 1)))


@dataclass(frozen=True)
class HolmResult:
    raw_p: float
    adjusted_p: float
    rejected: bool


def holm_adjust(raw_p, alpha: float) -> list[HolmResult]:
    """Holm step-down correction; results returned in input order.

    Sorted ascending, hypothesis i (1-based) is rejected iff
    p_(i) <= alpha / (m - i + 1) and every earlier hypothesis was rejected;
    the adjusted p is the running maximum of min(1, (m - i + 1) * p_(i)).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    p = np.asarray(raw_p, dtype=np.float64)
    m = len(p)
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    rejected = np.zeros(m, dtype=bool)
    running_adj = 0.0
    chain_alive = True
    for i, idx in enumerate(order):
        running_adj = max(running_adj, min(1.0, (m - i) * p[idx]))
        adjusted[idx] = running_adj
        if chain_alive and p[idx] <= alpha / (m - i):
            rejected[idx] = True
        else:
            chain_alive = False
    return [HolmResult(float(p[i]), float(adjusted[i]), bool(rejected[i])) for i in range(m)]


@dataclass(frozen=True)
class PairwiseTestResult:
    pair: tuple[str, str]
    statistic: float
    raw_p: float
    holm_adjusted_p: float
    rejected_at_alpha: bool
    alpha: float


def pairwise_wilcoxon_holm(m: AccuracyMatrix, alpha: float = 0.05) -> list[PairwiseTestResult]:
    """All-pairs Wilcoxon signed-rank tests over datasets, Holm-corrected."""
    k = len(m.classifiers)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    raws = []
    stats = []
    for i, j in pairs:
        res = wilcoxon_signed_rank(m.cells[:, i], m.cells[:, j])
        raws.append(res.p)
        stats.append(res.w)
    holm = holm_adjust(raws, alpha)
    return [
        PairwiseTestResult(
            pair=(m.classifiers[i], m.classifiers[j]),
            statistic=stats[idx],
            raw_p=holm[idx].raw_p,
            holm_adjusted_p=holm[idx].adjusted_p,
            rejected_at_alpha=holm[idx].rejected,
            alpha=alpha,
        )
        for idx, (i, j) in enumerate(pairs)
    ]


@dataclass(frozen=True)
class CliqueSet:
    """Maximal rejection-free intervals of the rank ordering."""

    order: tuple[int, ...]  # classifier indices sorted by mean rank (best first)
    cliques: tuple[tuple[int, ...], ...]  # each a tuple of classifier indices


def form_cliques(ranks: RankSummary, rejected: np.ndarray) -> CliqueSet:
    """Group classifiers into cliques along the mean-rank ordering.

    ``rejected[i, j]`` is True when the (i, j) rank difference is significant.
    From every start position the interval extends while no inside pair is
    rejected; intervals contained in a longer kept interval are dropped.
    """
    rejected = np.asarray(rejected, dtype=bool)
    k = len(ranks.classifiers)
    if rejected.shape != (k, k) or (rejected != rejected.T).any():
        raise ValueError("rejection matrix must be a symmetric k x k boolean matrix")
    order = tuple(int(i) for i in np.argsort(ranks.mean_ranks, kind="stable"))

    intervals = []
    for start in range(k):
        end = start
        while end + 1 < k and not any(
            rejected[order[a], order[end + 1]] for a in range(start, end + 1)
        ):
            end += 1
        intervals.append((start, end))
    kept = []
    for start, end in intervals:
        if kept and kept[-1][1] >= end:  # contained in the previous interval
            continue
        kept.append((start, end))
    cliques = tuple(tuple(order[s : e + 1]) for s, e in kept)
    return CliqueSet(order=order, cliques=cliques)


@dataclass(frozen=True)
class SharpshooterPoint:
    train_ratio: float
    test_ratio: float
    quadrant: str  # TP | TN | FP | FN

    @classmethod
    def classify(cls, train_ratio: float, test_ratio: float) -> "SharpshooterPoint":
        if not (train_ratio > 0 and test_ratio > 0):
            raise ValueError("ratios must be positive")
        predicted_gain = train_ratio > 1.0  # exactly 1 counts as no gain
        observed_gain = test_ratio > 1.0
        quadrant = {
            (True, True): "TP",
            (False, False): "TN",
            (True, False): "FP",
            (False, True): "FN",
        }[(predicted_gain, observed_gain)]
        return cls(train_ratio, test_ratio, quadrant)


def sharpshooter(points) -> tuple[dict, float]:
    """Quadrant counts and the correct-decision rate (TP + TN) / total."""
    counts = {"TP": 0, "TN": 0, "FP": 0, "FN": 0}
    classified = [
        p if isinstance(p, SharpshooterPoint) else SharpshooterPoint.classify(*p) for p in points
    ]
    if not classified:
        raise ValueError("no sharpshooter points")
    for p in classified:
        counts[p.quadrant] += 1
    rate = (counts["TP"] + counts["TN"]) / len(classified)
    return counts, rate
