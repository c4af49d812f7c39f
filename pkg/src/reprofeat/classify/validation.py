from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def precision_recall_f1(y_true, y_pred) -> tuple[float, float, float]:
    """Scores for the positive class; 0 wherever a denominator vanishes."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    tp = int(((y_pred == 1) & (y_true == 1)).sum())
    fp = int(((y_pred == 1) & (y_true == 0)).sum())
    fn = int(((y_pred == 0) & (y_true == 1)).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def stratified_kfold(y, k: int = 5, seed: int | Any = 42) -> np.ndarray:
    """Fold id (0..k-1) per row, preserving class proportions.

    Members of each class are shuffled and dealt round-robin; the dealing
    offset carries over between classes so fold sizes stay balanced.
    """
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=int)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if len(idx) < k:
            raise ValueError(f"class {c!r} has {len(idx)} members, fewer than k={k} folds")
        idx = rng.permutation(idx)
        folds[idx] = (offset + np.arange(len(idx))) % k
        offset += len(idx)
    return folds


@dataclass(frozen=True)
class FoldScore:
    repeat: int
    fold: int
    precision: float
    recall: float
    f1: float
    n_test: int


@dataclass
class CVResult:
    classifier: str
    seed: int
    k: int
    repeats: int
    folds: list[FoldScore] = field(default_factory=list)
    assignments: list[np.ndarray] = field(default_factory=list)

    def _mean(self, attr: str) -> float:
        return float(np.mean([getattr(f, attr) for f in self.folds])) if self.folds else 0.0

    @property
    def precision(self) -> float:
        return self._mean("precision")

    @property
    def recall(self) -> float:
        return self._mean("recall")

    @property
    def f1(self) -> float:
        return self._mean("f1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "classifier": self.classifier,
            "seed": self.seed,
            "k": self.k,
            "repeats": self.repeats,
            "mean": {"precision": self.precision, "recall": self.recall, "f1": self.f1},
            "folds": [f.__dict__ for f in self.folds],
            "assignments": [a.tolist() for a in self.assignments],
        }
