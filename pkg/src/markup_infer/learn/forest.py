"""Random forest: bootstrapped trees with per-split feature subsampling."""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from .._random import derive_rng
from .tree import DecisionTree


def majority_vote(tree_predictions: np.ndarray, n_classes: int) -> tuple:
    """Column-wise vote over encoded predictions (trees x samples).

    Returns ``(labels, vote_counts)``; ties go to the lowest class index.
    """
    n_trees, n = tree_predictions.shape
    votes = np.zeros((n, n_classes))
    rows = np.arange(n)
    for preds in tree_predictions:
        np.add.at(votes, (rows, preds), 1.0)
    return np.argmax(votes, axis=1), votes


class RandomForest(ClassifierMixin, BaseEstimator):
    """Majority vote of decision trees, each grown on a bootstrap resample.

    Every split considers ``ceil(sqrt(d))`` randomly chosen features unless
    ``max_features`` says otherwise.  All randomness derives from
    ``random_state``: tree ``i`` uses its own stream, so forests are
    reproducible tree by tree.
    """

    def __init__(self, n_estimators: int = 10, criterion: str = "gini", min_impurity_decrease: float = 0.0,
                 max_features="sqrt", bootstrap: bool = True, random_state: Optional[int] = None):
        self.n_estimators = n_estimators
        self.criterion = criterion
        self.min_impurity_decrease = min_impurity_decrease
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        n = X.shape[0]
        seed = self.random_state or 0
        self.estimators_ = []
        for i in range(int(self.n_estimators)):
            rng = derive_rng(seed, "forest", i)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(self.criterion, self.min_impurity_decrease, self.max_features)
            tree.classes_ = self.classes_
            tree._build(X[idx], y_enc[idx], len(self.classes_), rng)
            self.estimators_.append(tree)
        self.n_features_in_ = X.shape[1]
        return self

    def tree_predictions(self, X) -> np.ndarray:
        check_is_fitted(self, "estimators_")
        return np.stack([t.predict_encoded(X) for t in self.estimators_])

    def predict(self, X) -> np.ndarray:
        labels, _ = majority_vote(self.tree_predictions(X), len(self.classes_))
        return self.classes_[labels]

    def predict_proba(self, X) -> np.ndarray:
        _, votes = majority_vote(self.tree_predictions(X), len(self.classes_))
        return votes / len(self.estimators_)

    def _learned(self) -> dict:
        return {"classes": self.classes_, "n_features": self.n_features_in_,
                "trees": [t._learned() for t in self.estimators_]}

    def _restore(self, p: dict) -> "RandomForest":
        self.classes_ = np.asarray(p["classes"])
        self.n_features_in_ = int(p["n_features"])
        self.estimators_ = [DecisionTree(self.criterion, self.min_impurity_decrease, self.max_features)._restore(t)
                            for t in p["trees"]]
        return self
