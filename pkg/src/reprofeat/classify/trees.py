"""Gini decision trees, a depth-limited random forest and AdaBoost on stumps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import Classifier, canonical_column_order, check_predict_data, check_training_data


@dataclass
class _Node:
    value: float  # weighted fraction of positives
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None


def _best_split(X, y, w, features):
    """Lowest weighted Gini over the candidate features; None if nothing improves."""
    total = w.sum()
    pos = (w * y).sum()
    p = pos / total
    best_impurity = 2 * p * (1 - p) - 1e-12
    best = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cw = np.cumsum(w[order])[:-1]
        cpos = np.cumsum((w * y)[order])[:-1]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        rw = total - cw
        with np.errstate(divide="ignore", invalid="ignore"):
            pl = np.where(cw > 0, cpos / cw, 0.0)
            pr = np.where(rw > 0, (pos - cpos) / rw, 0.0)
        impurity = (cw * 2 * pl * (1 - pl) + rw * 2 * pr * (1 - pr)) / total
        impurity = np.where(valid, impurity, np.inf)
        i = int(np.argmin(impurity))
        if impurity[i] < best_impurity:
            best_impurity = impurity[i]
            best = (f, (xs[i] + xs[i + 1]) / 2.0)
    return best


class DecisionTree(Classifier):
    def __init__(self, max_depth: int | None = None, min_samples_split: int = 2, max_features: int | None = None, seed: int = 0):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y, sample_weight=None, _order=None, _rng=None):
        if _order is None:
            X, y = check_training_data(X, y)
            _order = canonical_column_order(X)
        self.n_features_ = X.shape[1]
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        rng = _rng if _rng is not None else np.random.default_rng(self.seed)
        self.root_ = self._grow(X, y.astype(float), w, 0, _order, rng)
        return self

    def _grow(self, X, y, w, depth, order, rng):
        total = w.sum()
        node = _Node(value=float((w * y).sum() / total) if total > 0 else 0.5)
        if (
            (self.max_depth is not None and depth >= self.max_depth)
            or len(y) < self.min_samples_split
            or node.value in (0.0, 1.0)
        ):
            return node
        features = order
        if self.max_features is not None and self.max_features < len(order):
            picks = np.sort(rng.choice(len(order), self.max_features, replace=False))
            features = order[picks]
        split = _best_split(X, y, w, features)
        if split is None:
            return node
        node.feature, node.threshold = split
        go_left = X[:, node.feature] <= node.threshold
        node.left = self._grow(X[go_left], y[go_left], w[go_left], depth + 1, order, rng)
        node.right = self._grow(X[~go_left], y[~go_left], w[~go_left], depth + 1, order, rng)
        return node

    def predict_positive_fraction(self, X) -> np.ndarray:
        X = check_predict_data(X, self.n_features_)
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = self.root_
            while node.left is not None:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out

    def decision_function(self, X):
        return self.predict_positive_fraction(X) - 0.5

    @property
    def depth(self) -> int:
        def walk(node):
            return 0 if node.left is None else 1 + max(walk(node.left), walk(node.right))

        return walk(self.root_)


class RandomForest(Classifier):
    """Bagged Gini trees with sqrt(d) candidate features per split; soft vote."""

    def __init__(self, n_estimators: int = 200, max_depth: int | None = 2, max_features: int | str | None = "sqrt", seed: int = 0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        n, d = X.shape
        self.n_features_ = d
        order = canonical_column_order(X)
        if self.max_features == "sqrt":
            m = max(1, int(math.sqrt(d)))
        else:
            m = d if self.max_features is None else int(self.max_features)
        rng = np.random.default_rng(self.seed)
        self.trees_ = []
        for _ in range(self.n_estimators):
            rows = rng.integers(0, n, n)
            # a one-class bootstrap still yields a valid constant tree
            tree = DecisionTree(max_depth=self.max_depth, max_features=m)
            tree.fit(X[rows], y[rows], _order=order, _rng=rng)
            self.trees_.append(tree)
        return self

    def decision_function(self, X):
        X = check_predict_data(X, self.n_features_)
        return np.mean([t.predict_positive_fraction(X) for t in self.trees_], axis=0) - 0.5


class AdaBoost(Classifier):
    """Discrete AdaBoost with depth-1 Gini stumps."""

    def __init__(self, n_rounds: int = 50, seed: int = 0):
        self.n_rounds = n_rounds
        self.seed = seed

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        order = canonical_column_order(X)
        sign = 2 * y - 1
        w = np.full(len(y), 1.0 / len(y))
        self.stumps_, self.alphas_ = [], []
        for _ in range(self.n_rounds):
            stump = DecisionTree(max_depth=1).fit(X, y, sample_weight=w, _order=order)
            h = np.where(stump.decision_function(X) >= 0, 1, -1)
            err = float(w[h != sign].sum() / w.sum())
            if err >= 0.5:
                break
            if err <= 1e-12:
                self.stumps_.append(stump)
                self.alphas_.append(10.0)
                break
            alpha = 0.5 * math.log((1 - err) / err)
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            w = w * np.exp(-alpha * sign * h)
            w /= w.sum()
        if not self.stumps_:
            # no stump beats chance; fall back to the majority class
            self.stumps_.append(DecisionTree(max_depth=0).fit(X, y, _order=order))
            self.alphas_.append(1.0)
        return self

    def _votes(self, X):
        X = check_predict_data(X, self.n_features_)
        for stump, alpha in zip(self.stumps_, self.alphas_):
            yield alpha * np.where(stump.decision_function(X) >= 0, 1.0, -1.0)

    def decision_function(self, X):
        return np.sum(list(self._votes(X)), axis=0)

    def staged_errors(self, X, y) -> list[float]:
        """Training error after each boosting round."""
        y = np.asarray(y)
        score = np.zeros(len(y))
        errors = []
        for vote in self._votes(X):
            score = score + vote
            errors.append(float(np.mean((score >= 0).astype(int) != y)))
        return errors
