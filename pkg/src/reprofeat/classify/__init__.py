"""Classical binary classifiers, stratified cross-validation and metrics."""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from .base import Classifier, check_training_data
from .linear import QDA, GaussianNB, KNeighbors, LogisticRegression
from .svm import SVM
from .trees import AdaBoost, DecisionTree, RandomForest
from .validation import CVResult, FoldScore, precision_recall_f1, stratified_kfold

CLASSIFIERS: dict[str, Callable[..., Classifier]] = {
    "logreg": lambda seed=0, **p: LogisticRegression(**p),
    "knn": lambda seed=0, **p: KNeighbors(**{"k": 5, **p}),
    "dtree": lambda seed=0, **p: DecisionTree(seed=seed, **p),
    "rforest": lambda seed=0, **p: RandomForest(**{"n_estimators": 200, "max_depth": 2, **p}, seed=seed),
    "adaboost": lambda seed=0, **p: AdaBoost(**{"n_rounds": 50, **p}, seed=seed),
    "gauss_nb": lambda seed=0, **p: GaussianNB(**p),
    "qda": lambda seed=0, **p: QDA(**p),
    "svm_rbf": lambda seed=0, **p: SVM(**p),
}


def make(kind: str, params: dict[str, Any] | None = None, seed: int = 0) -> Classifier:
    try:
        factory = CLASSIFIERS[kind]
    except KeyError:
        raise ValueError(f"unknown classifier {kind!r}; choose from {', '.join(CLASSIFIERS)}") from None
    return factory(seed=seed, **(params or {}))


def fit(kind: str, X, y, params: dict[str, Any] | None = None, seed: int = 0) -> Classifier:
    return make(kind, params, seed).fit(X, y)


def predict(model: Classifier, X) -> np.ndarray:
    return model.predict(X)


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def cross_validate(
    kind: str,
    X,
    y,
    k: int = 5,
    repeats: int = 1,
    seed: int = 42,
    params: dict[str, Any] | None = None,
) -> CVResult:
    """Repeated stratified k-fold CV reporting positive-class precision, recall and F1."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    make(kind, params)  # fail fast on an unknown classifier
    result = CVResult(classifier=kind, seed=seed, k=k, repeats=repeats)
    for r in range(repeats):
        folds = stratified_kfold(y, k, seed=_derived_seed(seed, r))
        result.assignments.append(folds)
        for f in range(k):
            test = folds == f
            model = fit(kind, X[~test], y[~test], params, seed=_derived_seed(seed, r, f))
            p, rec, f1 = precision_recall_f1(y[test], model.predict(X[test]))
            result.folds.append(FoldScore(r, f, p, rec, f1, int(test.sum())))
    return result


__all__ = [
    "AdaBoost",
    "CLASSIFIERS",
    "CVResult",
    "Classifier",
    "DecisionTree",
    "FoldScore",
    "GaussianNB",
    "KNeighbors",
    "LogisticRegression",
    "QDA",
    "RandomForest",
    "SVM",
    "check_training_data",
    "cross_validate",
    "fit",
    "make",
    "precision_recall_f1",
    "predict",
    "stratified_kfold",
]
