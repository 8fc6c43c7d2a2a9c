"""Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


class GaussianNB(ClassifierMixin, BaseEstimator):
    """Naive Bayes with per-class Gaussian likelihoods.

    Per-class variances are floored at ``var_smoothing`` times the largest
    feature variance of the training data, so constant slices of
    standardized data do not produce zero variances.
    """

    def __init__(self, var_smoothing: float = 1e-9):
        self.var_smoothing = var_smoothing

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        if len(self.classes_) < 2:
            raise ValueError("GaussianNB needs at least two classes")
        k, d = len(self.classes_), X.shape[1]
        self.theta_ = np.zeros((k, d))
        self.var_ = np.zeros((k, d))
        self.class_prior_ = np.zeros(k)
        for c in range(k):
            Xc = X[y_enc == c]
            self.theta_[c] = Xc.mean(axis=0)
            self.var_[c] = Xc.var(axis=0)
            self.class_prior_[c] = len(Xc) / len(X)
        floor = self.var_smoothing * float(np.max(X.var(axis=0))) if d else 0.0
        self.epsilon_ = floor if floor > 0 else self.var_smoothing
        self.var_ = np.maximum(self.var_, self.epsilon_)
        self.n_features_in_ = d
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        check_is_fitted(self, "theta_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: got {X.shape[1]}, expected {self.n_features_in_}")
        out = np.empty((X.shape[0], len(self.classes_)))
        for c in range(len(self.classes_)):
            norm = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            sq = -0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            out[:, c] = np.log(self.class_prior_[c]) + norm + sq
        return out

    def predict_log_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X) -> np.ndarray:
        return np.exp(self.predict_log_proba(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.joint_log_likelihood(X), axis=1)]

    def _learned(self) -> dict:
        return {"classes": self.classes_, "theta": self.theta_, "var": self.var_,
                "prior": self.class_prior_, "epsilon": self.epsilon_}

    def _restore(self, p: dict) -> "GaussianNB":
        self.classes_ = np.asarray(p["classes"])
        self.theta_ = np.asarray(p["theta"], dtype=np.float64).reshape(len(self.classes_), -1)
        self.var_ = np.asarray(p["var"], dtype=np.float64).reshape(self.theta_.shape)
        self.class_prior_ = np.asarray(p["prior"], dtype=np.float64)
        self.epsilon_ = float(p["epsilon"])
        self.n_features_in_ = self.theta_.shape[1]
        return self
