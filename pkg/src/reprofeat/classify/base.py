from __future__ import annotations

import hashlib

import numpy as np


def check_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    if X.shape[1] == 0:
        raise ValueError("X has no feature columns")
    if len(X) != len(y):
        raise ValueError(f"X has {len(X)} rows but y has {len(y)} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    y = y.astype(int)
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")
    if not np.isfinite(X).all():
        raise ValueError("X contains NaN or infinite values")
    return X, y


def check_predict_data(X, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} feature columns, got shape {X.shape}")
    return X


def canonical_column_order(X: np.ndarray) -> np.ndarray:
    """Order columns by a hash of their contents.

    Tree learners walk features in this order and break gain ties with it,
    so permuting the input columns leaves the fitted model unchanged.
    """
    keys = [hashlib.sha1(np.ascontiguousarray(X[:, j]).tobytes()).hexdigest() for j in range(X.shape[1])]
    return np.array(sorted(range(X.shape[1]), key=lambda j: (keys[j], j)), dtype=int)


class Classifier:
    """Binary classifier over labels {0, 1}; score >= 0 predicts 1."""

    n_features_: int

    def fit(self, X, y) -> "Classifier":
        raise NotImplementedError

    def decision_function(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(int)
