"""Linear SVM trained by Pegasos-style subgradient descent, one-vs-rest."""

from __future__ import annotations

import math
import warnings
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .._random import derive_rng


def hinge_objective(W: np.ndarray, Xa: np.ndarray, Ypm: np.ndarray, lam: float) -> np.ndarray:
    """Per-class ``lam/2 ||w||^2 + mean(max(0, 1 - y w.x))`` on augmented inputs."""
    margins = Ypm * (Xa @ W.T)
    return 0.5 * lam * np.sum(W * W, axis=1) + np.maximum(0.0, 1.0 - margins).mean(axis=0)


class LinearSVM(ClassifierMixin, BaseEstimator):
    """One-vs-rest linear SVM minimizing L2-regularized hinge loss.

    Each binary problem minimizes ``lam/2 ||w||^2 + 1/n sum hinge`` with
    ``lam = 1 / (C n)``.  Optimization runs in epochs over a seeded
    permutation of the data, in mini-batches, with step ``1 / (lam t)`` and
    projection onto the ball of radius ``1 / sqrt(lam)``.  Training stops
    when the objective has failed to improve by more than ``tol`` for
    ``n_iter_no_change`` consecutive epochs, or after ``max_iter`` epochs;
    the best iterate seen is kept.

    The intercept is learned as the weight of an extra input column whose
    value is the RMS row norm of the training data, which keeps training
    equivariant to rescaling the inputs.  ``C = 0`` leaves only the
    regularizer, so all weights stay zero (a warning is issued).
    """

    def __init__(self, C: float = 1.0, tol: float = 1e-4, max_iter: int = 10_000, batch_size: int = 32,
                 n_iter_no_change: int = 50, random_state: Optional[int] = None):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.batch_size = batch_size
        self.n_iter_no_change = n_iter_no_change
        self.random_state = random_state

    def _augment(self, X: np.ndarray) -> np.ndarray:
        return np.hstack([X, np.full((X.shape[0], 1), self.intercept_scaling_)])

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        n, d = X.shape
        k = len(self.classes_)
        self.n_features_in_ = d
        rms = math.sqrt(float(np.mean(np.sum(X * X, axis=1))))
        self.intercept_scaling_ = rms if rms > 0 else 1.0
        n_models = 1 if k == 1 else k
        W = np.zeros((n_models, d + 1))
        self.n_iter_ = 0
        if k == 1 or self.C <= 0:
            if self.C <= 0:
                warnings.warn("C = 0 leaves only the regularizer; all weights are zero", RuntimeWarning)
            self.coef_ = W
            return self
        Xa = self._augment(X)
        Ypm = np.where(np.eye(k, dtype=bool)[y_enc], 1.0, -1.0)
        lam = 1.0 / (self.C * n)
        radius = 1.0 / math.sqrt(lam)
        rng = derive_rng(self.random_state or 0, "svm")
        best_W, best_obj = W.copy(), float(np.sum(hinge_objective(W, Xa, Ypm, lam)))
        stall, t, bs = 0, 0, max(1, int(self.batch_size))
        for epoch in range(int(self.max_iter)):
            perm = rng.permutation(n)
            for start in range(0, n, bs):
                rows = perm[start:start + bs]
                t += 1
                eta = 1.0 / (lam * t)
                Xb, Yb = Xa[rows], Ypm[rows]
                active = (Yb * (Xb @ W.T)) < 1.0
                W *= 1.0 - eta * lam
                W += (eta / len(rows)) * ((active * Yb).T @ Xb)
                norms = np.linalg.norm(W, axis=1)
                over = norms > radius
                if over.any():
                    W[over] *= (radius / norms[over])[:, None]
            self.n_iter_ = epoch + 1
            obj = float(np.sum(hinge_objective(W, Xa, Ypm, lam)))
            if obj < best_obj - self.tol:
                stall = 0
            else:
                stall += 1
            if obj < best_obj:
                best_obj, best_W = obj, W.copy()
            if stall >= self.n_iter_no_change:
                break
        self.coef_ = best_W
        self.objective_ = best_obj
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: got {X.shape[1]}, expected {self.n_features_in_}")
        return self._augment(X) @ self.coef_.T

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.repeat(self.classes_, scores.shape[0])
        return self.classes_[np.argmax(scores, axis=1)]

    @property
    def intercept_(self) -> np.ndarray:
        return self.coef_[:, -1] * self.intercept_scaling_

    def _learned(self) -> dict:
        return {"classes": self.classes_, "coef": self.coef_, "intercept_scaling": self.intercept_scaling_,
                "n_features": self.n_features_in_}

    def _restore(self, p: dict) -> "LinearSVM":
        self.classes_ = np.asarray(p["classes"])
        self.n_features_in_ = int(p["n_features"])
        self.coef_ = np.asarray(p["coef"], dtype=np.float64).reshape(-1, self.n_features_in_ + 1)
        self.intercept_scaling_ = float(p["intercept_scaling"])
        return self
