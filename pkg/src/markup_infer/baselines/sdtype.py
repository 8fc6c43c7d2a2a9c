"""SD-Type adapted to markup: outgoing predicates only.

For every predicate key ``p`` the class distribution ``P(c | p)`` is
estimated from training nodes carrying ``p``.  Each key is weighted by how
far its distribution deviates from uniform,
``w(p) = sum_c (P(c | p) - 1/K)^2``, and a node is scored per class by
``sum_p w(p) P(c | p)`` over its distinct keys.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..dataset import LabeledInstance
from ..features import node_keys
from ..ingest.nodes import NodeRecord
from ..tasks import parse_task
from ..vocab import load_vocabulary


@dataclass(frozen=True)
class SDTypeStatistics:
    classes: tuple
    conditional: dict  # key -> np.ndarray over classes
    weights: dict      # key -> float
    priors: np.ndarray

    def scores(self, keys) -> np.ndarray:
        s = np.zeros(len(self.classes))
        for k in set(keys):
            dist = self.conditional.get(k)
            if dist is not None:
                s += self.weights[k] * dist
        return s

    def predict(self, keys) -> str:
        s = self.scores(keys)
        if not np.any(s > 0):
            return self.classes[int(np.argmax(self.priors))]
        return self.classes[int(np.argmax(s))]


def train_sdtype(key_sets: Sequence, labels: Sequence[str], classes: Optional[Sequence[str]] = None) -> SDTypeStatistics:
    """Estimate conditional tables from per-node key collections."""
    if len(key_sets) == 0:
        raise ValueError("empty training set")
    classes = tuple(classes) if classes is not None else tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    per_key: dict = {}
    for keys, label in zip(key_sets, labels):
        for key in set(keys):
            per_key.setdefault(key, np.zeros(k))[index[label]] += 1
    conditional, weights = {}, {}
    for key, counts in per_key.items():
        dist = counts / counts.sum()
        conditional[key] = dist
        weights[key] = float(np.sum((dist - 1.0 / k) ** 2))
    prior_counts = Counter(labels)
    priors = np.array([prior_counts[c] for c in classes], dtype=float) / len(labels)
    return SDTypeStatistics(classes, conditional, weights, priors)


def predict_sdtype(stats: SDTypeStatistics, node: NodeRecord, vocab=None, task="events") -> str:
    vocab = vocab or load_vocabulary()
    task = parse_task(task) if isinstance(task, str) else task
    return stats.predict(node_keys(node, vocab, task))


class SDTypeClassifier(ClassifierMixin, BaseEstimator):
    """Estimator wrapper taking ``LabeledInstance`` sequences."""

    def __init__(self, task: str = "events", vocabulary: Optional[str] = None):
        self.task = task
        self.vocabulary = vocabulary

    def _keys(self, instances):
        return [set(node_keys(i.node, self.vocab_, self.task_)) for i in instances]

    def fit(self, instances: Sequence[LabeledInstance], y=None):
        self.task_ = parse_task(self.task)
        self.vocab_ = load_vocabulary(self.vocabulary)
        instances = list(instances)
        y = [i.label for i in instances] if y is None else list(y)
        self.stats_ = train_sdtype(self._keys(instances), y)
        self.classes_ = np.asarray(self.stats_.classes)
        return self

    def predict(self, instances: Sequence[LabeledInstance]) -> np.ndarray:
        check_is_fitted(self, "stats_")
        return np.asarray([self.stats_.predict(k) for k in self._keys(instances)])
