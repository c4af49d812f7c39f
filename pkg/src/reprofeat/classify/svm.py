"""RBF support vector machine trained by sequential minimal optimization.

Each step picks the maximal violating pair of multipliers (first-order
working-set selection) and solves the two-variable subproblem analytically,
as in LIBSVM. Training stops once the KKT violation gap falls below ``tol``.
"""

from __future__ import annotations

import numpy as np

from .base import Classifier, check_predict_data, check_training_data

_TAU = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A ** 2).sum(axis=1)[:, None] + (B ** 2).sum(axis=1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


class SVM(Classifier):
    def __init__(self, C: float = 1.0, gamma: float | str = "scale", tol: float = 1e-3, max_iter: int | None = None):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _gamma(self, X: np.ndarray) -> float:
        if self.gamma != "scale":
            return float(self.gamma)
        var = X.var()
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        n = len(y)
        self.n_features_ = X.shape[1]
        self.gamma_ = self._gamma(X)
        s = (2 * y - 1).astype(float)
        K = rbf_kernel(X, X, self.gamma_)
        Q = (s[:, None] * s[None, :]) * K
        C = self.C
        alpha = np.zeros(n)
        grad = -np.ones(n)
        max_iter = self.max_iter or max(10_000_000 // max(n, 1), 100 * n)

        self.n_iter_ = 0
        for it in range(max_iter):
            i, j, gap = self._select(alpha, grad, s)
            self.n_iter_ = it
            if gap < self.tol:
                break
            old_i, old_j = alpha[i], alpha[j]
            if s[i] != s[j]:
                quad = max(K[i, i] + K[j, j] - 2 * K[i, j], _TAU)
                delta = (-grad[i] - grad[j]) / quad
                diff = alpha[i] - alpha[j]
                alpha[i] += delta
                alpha[j] += delta
                if diff > 0 and alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
                elif diff <= 0 and alpha[i] < 0:
                    alpha[i], alpha[j] = 0.0, -diff
                if diff > 0 and alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
                elif diff <= 0 and alpha[j] > C:
                    alpha[j], alpha[i] = C, C + diff
            else:
                quad = max(K[i, i] + K[j, j] - 2 * K[i, j], _TAU)
                delta = (grad[i] - grad[j]) / quad
                total = alpha[i] + alpha[j]
                alpha[i] -= delta
                alpha[j] += delta
                if total > C and alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
                elif total <= C and alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, total
                if total > C and alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
                elif total <= C and alpha[i] < 0:
                    alpha[i], alpha[j] = 0.0, total
            d_i, d_j = alpha[i] - old_i, alpha[j] - old_j
            grad += Q[:, i] * d_i + Q[:, j] * d_j

        self.alpha_ = np.clip(alpha, 0.0, C)
        self.kkt_gap_ = self._select(self.alpha_, grad, s)[2]
        self.rho_ = self._rho(self.alpha_, grad, s)
        sv = self.alpha_ > 0
        self.support_vectors_ = X[sv]
        self.dual_coef_ = (self.alpha_ * s)[sv]
        return self

    def _select(self, alpha, grad, s):
        C = self.C
        up = ((s > 0) & (alpha < C)) | ((s < 0) & (alpha > 0))
        low = ((s > 0) & (alpha > 0)) | ((s < 0) & (alpha < C))
        score = -s * grad
        if not up.any() or not low.any():
            return 0, 0, 0.0
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        return i, j, float(score[i] - score[j])

    def _rho(self, alpha, grad, s):
        yg = s * grad
        free = (alpha > 0) & (alpha < self.C)
        if free.any():
            return float(yg[free].mean())
        C = self.C
        upper = ((s > 0) & (alpha >= C)) | ((s < 0) & (alpha <= 0))
        lower = ((s > 0) & (alpha <= 0)) | ((s < 0) & (alpha >= C))
        ub = yg[lower].min() if lower.any() else np.inf
        lb = yg[upper].max() if upper.any() else -np.inf
        if not np.isfinite(ub) or not np.isfinite(lb):
            return 0.0
        return float((ub + lb) / 2)

    def decision_function(self, X):
        X = check_predict_data(X, self.n_features_)
        if len(self.support_vectors_) == 0:
            return np.full(len(X), -self.rho_)
        return rbf_kernel(X, self.support_vectors_, self.gamma_) @ self.dual_coef_ - self.rho_
