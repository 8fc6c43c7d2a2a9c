from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .._random import derive_rng


def predict_random(classes: Sequence[str], seed: int) -> str:
    """One uniform draw from ``classes``."""
    if not classes:
        raise ValueError("empty class list")
    return classes[int(derive_rng(seed, "random-baseline").integers(len(classes)))]


class RandomClassifier(ClassifierMixin, BaseEstimator):
    """Predicts a uniformly random class; ignores the inputs entirely."""

    def __init__(self, random_state: Optional[int] = None):
        self.random_state = random_state

    def fit(self, X, y=None):
        if y is None:
            y = [i.label for i in X]
        self.classes_ = np.unique(np.asarray(y))
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "classes_")
        rng = derive_rng(self.random_state or 0, "random-baseline")
        return self.classes_[rng.integers(len(self.classes_), size=len(X))]
