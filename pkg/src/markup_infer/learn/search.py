"""Random hyperparameter search over fixed ranges."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from sklearn.base import clone

from .._random import derive_rng, derive_seed
from ..evaluation import macro_f1


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))

    def contains(self, v) -> bool:
        return self.low <= v <= self.high


@dataclass(frozen=True)
class IntRange:
    low: int
    high: int

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.low, self.high + 1))

    def contains(self, v) -> bool:
        return self.low <= v <= self.high and int(v) == v


@dataclass(frozen=True)
class Choice:
    options: tuple

    def sample(self, rng: np.random.Generator):
        return self.options[int(rng.integers(len(self.options)))]

    def contains(self, v) -> bool:
        return v in self.options


SPACES = {
    "dtree": {"criterion": Choice(("gini", "entropy")), "min_impurity_decrease": Uniform(0.0, 1.0)},
    "rforest": {"criterion": Choice(("gini", "entropy")), "min_impurity_decrease": Uniform(0.0, 1.0),
                "n_estimators": IntRange(5, 20)},
    "svm": {"C": Uniform(0.0, 5.0), "tol": Uniform(0.0, 1e-3)},
}


def sample_params(space: Mapping, rng: np.random.Generator) -> dict:
    return {name: dist.sample(rng) for name, dist in space.items()}


@dataclass
class SearchResult:
    best_params: dict
    best_score: float
    best_trial: int
    trials: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"best_params": self.best_params, "best_score": self.best_score,
                "best_trial": self.best_trial, "trials": self.trials}


def validation_carve(y: Sequence, seed: int, ratio: float = 0.8) -> tuple:
    """Per-class floor split of row indices into (fit, validation)."""
    y = np.asarray(y)
    fit_idx, val_idx = [], []
    for c in np.unique(y):
        rows = np.nonzero(y == c)[0]
        rows = rows[derive_rng(seed, "carve", str(c)).permutation(len(rows))]
        n_fit = math.floor(len(rows) * ratio + 1e-9)
        if len(rows) >= 2:
            n_fit = min(max(n_fit, 1), len(rows) - 1)
        fit_idx.extend(rows[:n_fit])
        val_idx.extend(rows[n_fit:])
    return np.sort(np.asarray(fit_idx, dtype=int)), np.sort(np.asarray(val_idx, dtype=int))


def random_search(estimator, space: Mapping, X, y, n_trials: int = 20, seed: int = 0,
                  scorer: Callable = macro_f1) -> SearchResult:
    """Try ``n_trials`` uniform draws from ``space``; keep the best (earliest on ties).

    Each trial fits a clone on 80% of the training rows and scores macro F1
    on the remaining 20%.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    y = np.asarray(y)
    fit_idx, val_idx = validation_carve(y, seed)
    rng = derive_rng(seed, "search")
    accepts_seed = "random_state" in estimator.get_params()
    trials, best = [], None
    for i in range(n_trials):
        params = sample_params(space, rng)
        model = clone(estimator).set_params(**params)
        if accepts_seed:
            model.set_params(random_state=derive_seed(seed, "trial", i))
        model.fit(X[fit_idx], y[fit_idx])
        score = float(scorer(y[val_idx], model.predict(X[val_idx])))
        trials.append({"trial": i, "params": params, "score": score})
        if best is None or score > best[1]:
            best = (i, score, params)
    return SearchResult(best[2], best[1], best[0], trials)
