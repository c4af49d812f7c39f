"""Logistic regression, k-nearest neighbours, Gaussian naive Bayes and QDA."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .base import Classifier, check_predict_data, check_training_data


class LogisticRegression(Classifier):
    """L2-regularized logistic regression fitted by gradient descent.

    Features are standardized internally; the step size is the inverse
    Lipschitz constant of the gradient.
    """

    def __init__(self, l2: float = 1e-4, max_iter: int = 1000, tol: float = 1e-6):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        self.scale_ = np.where(scale > 0, scale, 1.0)
        Z = np.column_stack(((X - self.mean_) / self.scale_, np.ones(len(X))))
        n = len(Z)
        lipschitz = 0.25 * np.linalg.norm(Z, 2) ** 2 / n + self.l2
        step = 1.0 / lipschitz
        w = np.zeros(Z.shape[1])
        reg = np.r_[np.ones(Z.shape[1] - 1), 0.0]  # bias is not penalized
        self.n_iter_ = 0
        for it in range(1, self.max_iter + 1):
            grad = Z.T @ (expit(Z @ w) - y) / n + self.l2 * reg * w
            w -= step * grad
            self.n_iter_ = it
            if np.linalg.norm(grad) < self.tol:
                break
        self.coef_, self.intercept_ = w[:-1], w[-1]
        return self

    def decision_function(self, X):
        X = check_predict_data(X, self.n_features_)
        return ((X - self.mean_) / self.scale_) @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack((1 - p, p))


class KNeighbors(Classifier):
    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.X_, self.y_ = X, y
        return self

    def decision_function(self, X):
        X = check_predict_data(X, self.n_features_)
        k = min(self.k, len(self.X_))
        d2 = ((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        votes = self.y_[nearest].sum(axis=1)
        # positive minus negative votes; an even split predicts positive
        return 2.0 * votes - k


class GaussianNB(Classifier):
    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.theta_ = np.array([X[y == c].mean(axis=0) for c in (0, 1)])
        self.var_ = np.array([X[y == c].var(axis=0) for c in (0, 1)]) + self.var_floor
        self.log_prior_ = np.log(np.array([np.mean(y == c) for c in (0, 1)]))
        return self

    def _joint_log_likelihood(self, X):
        X = check_predict_data(X, self.n_features_)
        out = []
        for c in (0, 1):
            ll = -0.5 * (np.log(2 * np.pi * self.var_[c]) + (X - self.theta_[c]) ** 2 / self.var_[c]).sum(axis=1)
            out.append(ll + self.log_prior_[c])
        return np.column_stack(out)

    def decision_function(self, X):
        jll = self._joint_log_likelihood(X)
        return jll[:, 1] - jll[:, 0]


class QDA(Classifier):
    """Per-class Gaussian with a full covariance, ridge-regularized."""

    def __init__(self, reg: float = 1e-6):
        self.reg = reg

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        d = X.shape[1]
        self.n_features_ = d
        self.means_, self.precisions_, self.logdets_, self.log_prior_ = [], [], [], []
        for c in (0, 1):
            Xc = X[y == c]
            mu = Xc.mean(axis=0)
            centered = Xc - mu
            cov = centered.T @ centered / max(len(Xc) - 1, 1) + self.reg * np.eye(d)
            sign, logdet = np.linalg.slogdet(cov)
            if sign <= 0:
                raise np.linalg.LinAlgError("class covariance is not positive definite")
            self.means_.append(mu)
            self.precisions_.append(np.linalg.inv(cov))
            self.logdets_.append(logdet)
            self.log_prior_.append(np.log(len(Xc) / len(X)))
        return self

    def decision_function(self, X):
        X = check_predict_data(X, self.n_features_)
        scores = []
        for c in (0, 1):
            diff = X - self.means_[c]
            maha = np.einsum("ij,jk,ik->i", diff, self.precisions_[c], diff)
            scores.append(-0.5 * (maha + self.logdets_[c]) + self.log_prior_[c])
        return scores[1] - scores[0]
