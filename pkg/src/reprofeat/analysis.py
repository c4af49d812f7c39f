"""Feature correlation pruning, univariate scoring and top-feature selection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .classify import cross_validate
from .features import CATEGORICAL, FeatureMatrix, filter_core_features

logger = logging.getLogger(__name__)

TAU_THRESHOLD = 0.8
MI_NEIGHBORS = 3
MI_JITTER = 1e-10
TOP_ANOVA = 8
MI_EXTRAS = ("citations_methodology",)


# --------------------------------------------------------------------------
# Kendall's tau-b


def _tied_pairs(sorted_values: np.ndarray) -> int:
    if len(sorted_values) == 0:
        return 0
    edges = np.flatnonzero(np.diff(sorted_values) != 0)
    runs = np.diff(np.concatenate(([0], edges + 1, [len(sorted_values)])))
    return int((runs * (runs - 1) // 2).sum())


def _inversions(seq: list[float]) -> int:
    """Strict inversions (i < j, seq[i] > seq[j]) by bottom-up merge sort."""
    n = len(seq)
    buf = list(seq)
    count = 0
    width = 1
    while width < n:
        merged = []
        for lo in range(0, n, 2 * width):
            left, right = buf[lo:lo + width], buf[lo + width:lo + 2 * width]
            i = j = 0
            while i < len(left) and j < len(right):
                if right[j] < left[i]:
                    merged.append(right[j])
                    count += len(left) - i
                    j += 1
                else:
                    merged.append(left[i])
                    i += 1
            merged.extend(left[i:])
            merged.extend(right[j:])
        buf = merged
        width *= 2
    return count


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Kendall tau (tau-b) in O(n log n).

    Returns NaN when either input is constant.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and of equal length")
    n = len(x)
    if n < 2:
        raise ValueError("kendall_tau needs at least 2 observations")
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    pairs = n * (n - 1) // 2
    x_ties = _tied_pairs(xs)
    y_ties = _tied_pairs(np.sort(y))
    same = np.concatenate(([True], (np.diff(xs) != 0) | (np.diff(ys) != 0)))
    runs = np.diff(np.concatenate((np.flatnonzero(same), [n])))
    joint_ties = int((runs * (runs - 1) // 2).sum())
    swaps = _inversions(ys.tolist())
    numerator = pairs - x_ties - y_ties + joint_ties - 2 * swaps
    denominator = (pairs - x_ties) * (pairs - y_ties)
    if denominator == 0:
        return math.nan
    return numerator / math.sqrt(denominator)


def _continuous(m: FeatureMatrix, exclude: frozenset[str] | set[str] = CATEGORICAL) -> list[int]:
    return [i for i, n in enumerate(m.names) if n not in exclude]


def tau_matrix(m: FeatureMatrix, columns: Sequence[int] | None = None) -> np.ndarray:
    """Pairwise tau over rows where both cells are real; undefined pairs are 0."""
    cols = list(range(len(m.names))) if columns is None else list(columns)
    out = np.eye(len(cols))
    real = ~m.mask
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            i, j = cols[a], cols[b]
            rows = real[:, i] & real[:, j]
            tau = kendall_tau(m.values[rows, i], m.values[rows, j]) if rows.sum() >= 2 else math.nan
            out[a, b] = out[b, a] = 0.0 if math.isnan(tau) else tau
    return out


@dataclass(frozen=True)
class Drop:
    feature: str
    partner: str
    tau: float


def correlation_prune(
    m: FeatureMatrix,
    threshold: float = TAU_THRESHOLD,
    exclude: frozenset[str] | set[str] = CATEGORICAL,
) -> tuple[FeatureMatrix, list[Drop]]:
    """Drop one feature of every pair with tau above ``threshold``.

    Pairs are visited by descending tau; of a still-alive pair the feature
    with fewer real values goes, the later one in column order on a tie.
    Excluded (categorical) columns are neither scored nor dropped.
    """
    cols = _continuous(m, exclude)
    taus = tau_matrix(m, cols)
    real_counts = m.real_counts()
    pairs = [
        (taus[a, b], a, b)
        for a in range(len(cols))
        for b in range(a + 1, len(cols))
        if taus[a, b] > threshold
    ]
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    alive = set(range(len(cols)))
    drops = []
    for tau, a, b in pairs:
        if a not in alive or b not in alive:
            continue
        name_a, name_b = m.names[cols[a]], m.names[cols[b]]
        loser, keeper = (a, b) if real_counts[name_a] < real_counts[name_b] else (b, a)
        alive.discard(loser)
        drops.append(Drop(m.names[cols[loser]], m.names[cols[keeper]], float(tau)))
    return m.drop(d.feature for d in drops), drops


# --------------------------------------------------------------------------
# univariate scores


def _xy(m: FeatureMatrix | np.ndarray, labels: Sequence[int] | None) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(m, FeatureMatrix):
        if labels is None:
            return m.labeled()
        return m.values, np.asarray(labels, dtype=int)
    X = np.asarray(m, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X, np.asarray(labels, dtype=int)


def anova_f(m: FeatureMatrix | np.ndarray, labels: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """One-way ANOVA F per column and a flag for zero-variance columns.

    A column with no variance at all scores 0; one whose groups are each
    constant but differ scores +inf.
    """
    X, y = _xy(m, labels)
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("ANOVA-F needs at least two classes")
    if len(y) <= len(classes):
        raise ValueError("ANOVA-F needs more samples than classes")
    grand = X.mean(axis=0)
    between = np.zeros(X.shape[1])
    within = np.zeros(X.shape[1])
    for c in classes:
        group = X[y == c]
        mu = group.mean(axis=0)
        between += len(group) * (mu - grand) ** 2
        within += ((group - mu) ** 2).sum(axis=0)
    df_between = len(classes) - 1
    df_within = len(y) - len(classes)
    tiny = np.finfo(float).eps * np.maximum(1.0, np.abs(X).max(axis=0)) ** 2 * len(y)
    degenerate = within <= tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (between / df_between) / (within / df_within)
    f[degenerate & (between <= tiny)] = 0.0
    f[degenerate & (between > tiny)] = np.inf
    return f, degenerate


def anova_f_scores(m: FeatureMatrix | np.ndarray, labels: Sequence[int] | None = None) -> np.ndarray:
    return anova_f(m, labels)[0]


def _standardize_jitter(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=float).copy()
    sd = x.std()
    if sd > 0:
        x /= sd
    return x + MI_JITTER * max(1.0, float(np.abs(x).mean())) * rng.standard_normal(len(x))


def _mi_discrete_target(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """kNN estimate of I(x; y) for continuous x and discrete y."""
    n = len(x)
    radius = np.empty(n)
    k_used = np.empty(n)
    class_size = np.empty(n)
    keep = np.ones(n, dtype=bool)
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if len(idx) < 2:
            keep[idx] = False
            continue
        kk = min(k, len(idx) - 1)
        dist, _ = cKDTree(x[idx, None]).query(x[idx, None], k=kk + 1)
        radius[idx] = dist[:, -1]
        k_used[idx] = kk
        class_size[idx] = len(idx)
    if keep.sum() < 2:
        return 0.0
    xs = x[keep, None]
    tree = cKDTree(xs)
    within = tree.query_ball_point(xs, r=radius[keep], return_length=True) - 1
    within = np.maximum(within, 1)
    return float(
        digamma(keep.sum()) + digamma(k_used[keep]).mean() - digamma(class_size[keep]).mean() - digamma(within).mean()
    )


def _mi_continuous(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """Kraskov-Stoegbauer-Grassberger estimate (first algorithm, max-norm)."""
    n = len(x)
    joint = np.column_stack((x, y))
    dist, _ = cKDTree(joint).query(joint, k=k + 1, p=np.inf)
    radius = np.nextafter(dist[:, -1], 0)
    nx = cKDTree(x[:, None]).query_ball_point(x[:, None], r=radius, p=np.inf, return_length=True) - 1
    ny = cKDTree(y[:, None]).query_ball_point(y[:, None], r=radius, p=np.inf, return_length=True) - 1
    return float(digamma(n) + digamma(k) - digamma(nx + 1).mean() - digamma(ny + 1).mean())


def clip_negative(values):
    """Negative MI estimates are sampling noise; report them as 0."""
    return np.maximum(np.asarray(values, dtype=float), 0.0)


def mutual_info_scores(
    m: FeatureMatrix | np.ndarray,
    labels: Sequence[int] | None = None,
    k: int = MI_NEIGHBORS,
    seed: int = 0,
    clip: bool = True,
) -> np.ndarray:
    """Per-column mutual information (nats) with a discrete label."""
    X, y = _xy(m, labels)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(y) <= k:
        raise ValueError(f"need more than k={k} samples")
    rng = np.random.default_rng(seed)
    raw = np.array([_mi_discrete_target(_standardize_jitter(X[:, j], rng), y, k) for j in range(X.shape[1])])
    return clip_negative(raw) if clip else raw


def mutual_info_continuous(x: Sequence[float], y: Sequence[float], k: int = MI_NEIGHBORS, seed: int = 0, clip: bool = True) -> float:
    """Mutual information (nats) between two continuous variables."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    if len(x) <= k:
        raise ValueError(f"need more than k={k} samples")
    rng = np.random.default_rng(seed)
    value = _mi_continuous(_standardize_jitter(x, rng), _standardize_jitter(y, rng), k)
    return max(value, 0.0) if clip else value


def normalize_scores(scores: Sequence[float]) -> np.ndarray:
    """Divide by the maximum; all-zero scores stay zero, +inf maps to 1."""
    s = np.asarray(scores, dtype=float)
    if s.size == 0:
        return s
    finite = np.isfinite(s)
    if not finite.all():
        return np.where(np.isposinf(s), 1.0, 0.0)
    top = s.max()
    return s / top if top > 0 else np.zeros_like(s)


def min_max_normalize(m: FeatureMatrix | np.ndarray):
    """Scale each column to [0, 1]; constant columns become 0.

    Returns ``(normalized, constant)`` where ``constant`` flags the
    degenerate columns. A FeatureMatrix input yields a FeatureMatrix.
    """
    X = m.values if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=float)
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = hi - lo
    constant = span <= 0
    out = np.zeros_like(X)
    ok = ~constant
    out[:, ok] = (X[:, ok] - lo[ok]) / span[ok]
    return (m.with_values(out) if isinstance(m, FeatureMatrix) else out), constant


# --------------------------------------------------------------------------
# selection


def rank_by_anova(m: FeatureMatrix, labels: Sequence[int] | None = None) -> list[str]:
    scores = anova_f_scores(m, labels)
    order = sorted(range(len(m.names)), key=lambda i: (-scores[i], i))
    return [m.names[i] for i in order]


def select_top_features(
    m: FeatureMatrix,
    labels: Sequence[int] | None = None,
    n_anova: int = TOP_ANOVA,
    mi_extras: Sequence[str] = MI_EXTRAS,
) -> list[str]:
    """Top ``n_anova`` features by ANOVA-F, then any extra MI picks not already in."""
    unknown = [f for f in mi_extras if f not in m.names]
    if unknown:
        raise KeyError(f"unknown extra feature(s): {', '.join(unknown)}")
    chosen = rank_by_anova(m, labels)[:n_anova] if n_anova > 0 else []
    for extra in mi_extras:
        if extra not in chosen:
            chosen.append(extra)
    return chosen


@dataclass
class SweepPoint:
    k: int
    features: list[str]
    f1: list[float]

    @property
    def summary(self) -> dict[str, float]:
        a = np.asarray(self.f1)
        q1, median, q3 = np.percentile(a, [25, 50, 75])
        return {"mean": float(a.mean()), "median": float(median), "q1": float(q1), "q3": float(q3)}


def sweep_top_features(
    m: FeatureMatrix,
    labels: Sequence[int] | None = None,
    classifier: str = "svm_rbf",
    max_k: int | None = None,
    folds: int = 5,
    repeats: int = 5,
    seed: int = 42,
) -> list[SweepPoint]:
    """Cross-validated F1 for the top-1 .. top-``max_k`` ANOVA-F features."""
    X, y = _xy(m, labels)
    sub = m if labels is not None else FeatureMatrix(
        [str(i) for i in range(len(y))], list(m.names), X, np.zeros(X.shape, dtype=bool)
    )
    ranking = rank_by_anova(sub, y)
    max_k = len(ranking) if max_k is None else min(max_k, len(ranking))
    points = []
    for k in range(1, max_k + 1):
        cols = [sub.names.index(n) for n in ranking[:k]]
        result = cross_validate(classifier, sub.values[:, cols], y, k=folds, repeats=repeats, seed=seed)
        points.append(SweepPoint(k, ranking[:k], [f.f1 for f in result.folds]))
    return points


# --------------------------------------------------------------------------
# report


@dataclass
class AnalysisReport:
    core_features: list[str]
    tau_features: list[str]
    tau_matrix: np.ndarray
    dropped: list[Drop]
    reduced_features: list[str]
    scored_features: list[str]
    anova_f: np.ndarray
    anova_degenerate: np.ndarray
    mutual_info: np.ndarray
    selected_features: list[str] = field(default_factory=list)

    @property
    def anova_f_normalized(self) -> np.ndarray:
        return normalize_scores(self.anova_f)

    @property
    def mutual_info_normalized(self) -> np.ndarray:
        return normalize_scores(self.mutual_info)

    def to_dict(self) -> dict[str, Any]:
        def num(x: float) -> float | str:
            return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")

        return {
            "core_features": self.core_features,
            "reduced_features": self.reduced_features,
            "selected_features": self.selected_features,
            "dropped": [{"feature": d.feature, "partner": d.partner, "tau": d.tau} for d in self.dropped],
            "tau": {"features": self.tau_features, "matrix": self.tau_matrix.round(12).tolist()},
            "scores": [
                {
                    "feature": name,
                    "anova_f": num(float(self.anova_f[i])),
                    "anova_f_normalized": float(self.anova_f_normalized[i]),
                    "anova_degenerate": bool(self.anova_degenerate[i]),
                    "mutual_info": float(self.mutual_info[i]),
                    "mutual_info_normalized": float(self.mutual_info_normalized[i]),
                }
                for i, name in enumerate(self.scored_features)
            ],
        }


def analyze(
    m: FeatureMatrix,
    min_real: int = 15,
    threshold: float = TAU_THRESHOLD,
    n_anova: int = TOP_ANOVA,
    mi_extras: Sequence[str] = MI_EXTRAS,
    k: int = MI_NEIGHBORS,
    seed: int = 42,
) -> AnalysisReport:
    """Core filter, tau pruning, then ANOVA-F / MI scoring of the reduced continuous features."""
    core = filter_core_features(m, min_real)
    cols = _continuous(core)
    taus = tau_matrix(core, cols)
    reduced, drops = correlation_prune(core, threshold)
    scored = [n for n in reduced.names if n not in CATEGORICAL]
    sub = reduced.select(scored)
    X, y = sub.labeled()
    labeled = FeatureMatrix([str(i) for i in range(len(y))], scored, X, np.zeros(X.shape, dtype=bool))
    f, degenerate = anova_f(X, y)
    mi = mutual_info_scores(X, y, k=k, seed=seed)
    extras = [e for e in mi_extras if e in scored]
    for e in mi_extras:
        if e not in scored:
            logger.warning("MI extra %r is not among the reduced features; skipped", e)
    selected = select_top_features(labeled, y, n_anova, extras)
    return AnalysisReport(
        core_features=list(core.names),
        tau_features=[core.names[i] for i in cols],
        tau_matrix=taus,
        dropped=drops,
        reduced_features=list(reduced.names),
        scored_features=scored,
        anova_f=f,
        anova_degenerate=degenerate,
        mutual_info=mi,
        selected_features=selected,
    )
