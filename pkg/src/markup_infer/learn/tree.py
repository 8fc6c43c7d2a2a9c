"""CART-style decision tree with Gini or information-gain splits."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .._random import derive_rng

CRITERIA = ("gini", "entropy")
_ALIASES = {"information-gain": "entropy", "information_gain": "entropy", "ent": "entropy"}
# decreases closer than this count as ties
TIE_EPS = 1e-12
_CHUNK = 2_000_000


def resolve_criterion(criterion: str) -> str:
    c = _ALIASES.get(criterion, criterion)
    if c not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    return c


def impurity(p: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of class-probability vectors along the last axis."""
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -np.sum(terms, axis=-1)


def split_decreases(X: np.ndarray, Y: np.ndarray, criterion: str, n_total: int):
    """Weighted impurity decrease of every midpoint split of every column.

    ``Y`` is one-hot (n x k).  Returns ``(dec, Xs)`` where ``dec[i, j]`` is the
    decrease when column ``j``'s ``i + 1`` smallest values go left (``-inf``
    where consecutive sorted values tie) and ``Xs`` is ``X`` sorted per column.
    """
    n = X.shape[0]
    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)
    cum = np.cumsum(Y[order], axis=0)
    left = cum[:-1]
    total = cum[-1:]
    right = total - left
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    parent = impurity(total[0, 0] / n, criterion)
    child = (n_left * impurity(left / n_left[..., None], criterion)
             + n_right * impurity(right / n_right[..., None], criterion)) / n
    dec = (n / n_total) * (parent - child)
    dec[Xs[:-1] >= Xs[1:]] = -np.inf
    return dec, Xs


def best_split(X: np.ndarray, Y: np.ndarray, features: np.ndarray, criterion: str, n_total: int):
    """(feature, threshold, decrease) of the best split, or None.

    Ties go to the lowest feature index, then the lowest threshold.
    """
    n, k = Y.shape
    if n < 2:
        return None
    step = max(1, _CHUNK // max(1, n * k))
    best = None
    for start in range(0, len(features), step):
        cols = features[start:start + step]
        dec, Xs = split_decreases(X[:, cols], Y, criterion, n_total)
        col_best = dec.max(axis=0)
        for j in np.argsort(cols, kind="stable"):
            if not np.isfinite(col_best[j]):
                continue
            if best is not None and not (col_best[j] > best[2] + TIE_EPS
                                         or (col_best[j] >= best[2] - TIE_EPS and cols[j] < best[0])):
                continue
            i = int(np.argmax(dec[:, j] >= col_best[j] - TIE_EPS))
            lo, hi = Xs[i, j], Xs[i + 1, j]
            thr = (lo + hi) / 2.0
            if thr >= hi:
                thr = lo
            best = (int(cols[j]), float(thr), float(dec[i, j]))
    return best


class DecisionTree(ClassifierMixin, BaseEstimator):
    """Greedy binary decision tree.

    A split is kept only when its weighted impurity decrease
    ``N_t / N * (I(t) - N_l / N_t * I(l) - N_r / N_t * I(r))`` is at least
    ``min_impurity_decrease``.  Leaves predict the majority class, ties going
    to the earlier class in ``classes_``.
    """

    def __init__(self, criterion: str = "gini", min_impurity_decrease: float = 0.0,
                 max_features=None, random_state: Optional[int] = None):
        self.criterion = criterion
        self.min_impurity_decrease = min_impurity_decrease
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        self._build(X, y_enc, len(self.classes_), derive_rng(self.random_state or 0, "tree"))
        return self

    def _n_candidates(self, d: int) -> int:
        mf = self.max_features
        if mf is None:
            return d
        if mf == "sqrt":
            return max(1, math.ceil(math.sqrt(d)))
        if isinstance(mf, float):
            return max(1, min(d, math.ceil(mf * d)))
        return max(1, min(d, int(mf)))

    def _build(self, X: np.ndarray, y_enc: np.ndarray, n_classes: int, rng: np.random.Generator):
        criterion = resolve_criterion(self.criterion)
        n, d = X.shape
        self.n_features_in_ = d
        Y = np.eye(n_classes)[y_enc]
        m = self._n_candidates(d)
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(idx):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(Y[idx].sum(axis=0))
            return len(feature) - 1

        stack = [(new_node(np.arange(n)), np.arange(n))]
        while stack:
            node, idx = stack.pop()
            counts = value[node]
            if len(idx) < 2 or np.count_nonzero(counts) <= 1:
                continue
            if m < d:
                feats = np.sort(rng.choice(d, size=m, replace=False))
            else:
                feats = np.arange(d)
            found = best_split(X[idx], Y[idx], feats, criterion, n)
            if found is None or found[2] < self.min_impurity_decrease - TIE_EPS:
                continue
            f, thr, _ = found
            go_left = X[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node], threshold[node] = f, thr
            left[node], right[node] = new_node(li), new_node(ri)
            stack.append((right[node], ri))
            stack.append((left[node], li))

        self.feature_ = np.asarray(feature, dtype=np.int64)
        self.threshold_ = np.asarray(threshold, dtype=np.float64)
        self.children_left_ = np.asarray(left, dtype=np.int64)
        self.children_right_ = np.asarray(right, dtype=np.int64)
        self.value_ = np.asarray(value, dtype=np.float64).reshape(-1, n_classes)
        return self

    @property
    def node_count(self) -> int:
        return len(self.feature_)

    def depth(self) -> int:
        depths = {0: 0}
        for i in range(self.node_count):
            for c in (self.children_left_[i], self.children_right_[i]):
                if c >= 0:
                    depths[int(c)] = depths[i] + 1
        return max(depths.values())

    def apply(self, X) -> np.ndarray:
        check_is_fitted(self, "feature_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: got {X.shape[1]}, expected {self.n_features_in_}")
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature_[node]
            rows = np.nonzero(feat >= 0)[0]
            if rows.size == 0:
                return node
            cur = node[rows]
            go_left = X[rows, feat[rows]] <= self.threshold_[cur]
            node[rows] = np.where(go_left, self.children_left_[cur], self.children_right_[cur])

    def predict_encoded(self, X) -> np.ndarray:
        return np.argmax(self.value_[self.apply(X)], axis=1)

    def predict(self, X) -> np.ndarray:
        return self.classes_[self.predict_encoded(X)]

    def predict_proba(self, X) -> np.ndarray:
        v = self.value_[self.apply(X)]
        return v / v.sum(axis=1, keepdims=True)

    def _learned(self) -> dict:
        return {"classes": self.classes_, "n_features": self.n_features_in_, "feature": self.feature_,
                "threshold": self.threshold_, "left": self.children_left_,
                "right": self.children_right_, "value": self.value_}

    def _restore(self, p: dict) -> "DecisionTree":
        self.classes_ = np.asarray(p["classes"])
        self.n_features_in_ = int(p["n_features"])
        self.feature_ = np.asarray(p["feature"], dtype=np.int64)
        self.threshold_ = np.asarray(p["threshold"], dtype=np.float64)
        self.children_left_ = np.asarray(p["left"], dtype=np.int64)
        self.children_right_ = np.asarray(p["right"], dtype=np.int64)
        self.value_ = np.asarray(p["value"], dtype=np.float64).reshape(-1, len(self.classes_))
        return self
