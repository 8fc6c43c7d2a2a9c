"""End-to-end classifier over markup nodes, and its JSON model file."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.utils.validation import check_is_fitted

from .dataset import LabeledInstance
from .features import FeatureSpace, MarkupVectorizer, Standardizer
from .ingest.domains import suffix_list_version
from .ingest.nodes import NodeRecord, pages
from .learn import RandomForest, algorithm_tag, make_classifier

MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


def as_instances(nodes: Sequence[NodeRecord], corpus: Optional[Iterable[NodeRecord]] = None) -> list:
    """Wrap unlabeled nodes for prediction, with page context from ``corpus``."""
    index = pages(corpus if corpus is not None else nodes)
    return [LabeledInstance(n, None, tuple(index.get(n.url, (n,)))) for n in nodes]


class MarkupClassifier(ClassifierMixin, BaseEstimator):
    """Featurize, standardize and classify labeled markup instances.

    ``fit`` and ``predict`` take sequences of ``LabeledInstance``; labels are
    read from the instances unless ``y`` is given.  The feature space and
    the standardizer are fit on the training instances only.
    """

    def __init__(self, classifier=None, task: str = "events", vocabulary: Optional[str] = None):
        self.classifier = classifier
        self.task = task
        self.vocabulary = vocabulary

    def fit(self, instances: Sequence[LabeledInstance], y=None, provenance: Optional[dict] = None):
        instances = list(instances)
        if y is None:
            y = [i.label for i in instances]
        self.vectorizer_ = MarkupVectorizer(self.task, self.vocabulary).fit(instances)
        X = self.vectorizer_.transform(instances)
        self.standardizer_ = Standardizer().fit(X)
        base = self.classifier if self.classifier is not None else RandomForest()
        self.classifier_ = clone(base).fit(self.standardizer_.transform(X), np.asarray(y))
        self.classes_ = self.classifier_.classes_
        self.provenance_ = {
            "vocabulary_version": self.vectorizer_.vocab_.version,
            "public_suffix_version": suffix_list_version(),
            "n_train": len(instances),
        }
        self.provenance_.update(provenance or {})
        return self

    def transform(self, instances: Sequence[LabeledInstance]) -> np.ndarray:
        check_is_fitted(self, "classifier_")
        return self.standardizer_.transform(self.vectorizer_.transform(instances))

    def predict(self, instances: Sequence[LabeledInstance]) -> np.ndarray:
        return self.classifier_.predict(self.transform(instances))

    def predict_vectors(self, X) -> np.ndarray:
        """Predict from raw (unstandardized) feature vectors."""
        check_is_fitted(self, "classifier_")
        return self.classifier_.predict(self.standardizer_.transform(X))

    def predict_scores(self, instances: Sequence[LabeledInstance]) -> np.ndarray:
        X = self.transform(instances)
        clf = self.classifier_
        if hasattr(clf, "predict_proba"):
            return clf.predict_proba(X)
        return clf.decision_function(X)

    @property
    def feature_space(self) -> FeatureSpace:
        return self.vectorizer_.space_


# --------------------------------------------------------------------------
# serialization: numbers are written as decimal strings (repr round-trips
# IEEE doubles exactly)


def _encode(obj):
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind in "fiub":
            data = [repr(float(x)) if obj.dtype.kind == "f" else str(int(x)) for x in obj.ravel()]
        else:
            data = [str(x) for x in obj.ravel()]
        return {"__array__": obj.dtype.kind, "shape": list(obj.shape), "data": data}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return {"__float__": repr(float(obj))}
    if isinstance(obj, (int, np.integer)):
        return {"__int__": str(int(obj))}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if "__array__" in obj:
            kind, data = obj["__array__"], obj["data"]
            if kind == "f":
                arr = np.array([float(x) for x in data], dtype=np.float64)
            elif kind in "iub":
                arr = np.array([int(x) for x in data], dtype=np.int64)
            else:
                arr = np.array(data, dtype=object).astype(str)
            return arr.reshape(obj["shape"])
        if "__float__" in obj:
            return float(obj["__float__"])
        if "__int__" in obj:
            return int(obj["__int__"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def model_to_dict(model: MarkupClassifier) -> dict:
    check_is_fitted(model, "classifier_")
    clf = model.classifier_
    return {
        "version": MODEL_VERSION,
        "algorithm": algorithm_tag(clf),
        "task": model.task,
        "hyperparameters": _encode(clf.get_params()),
        "classes": [str(c) for c in model.classes_],
        "feature_space": model.feature_space.to_json(),
        "standardizer": _encode({"mean": model.standardizer_.mean_, "scale": model.standardizer_.scale_}),
        "parameters": _encode(clf._learned()),
        "provenance": _encode(model.provenance_),
    }


def model_from_dict(data: dict) -> MarkupClassifier:
    if not isinstance(data, dict) or data.get("version") != MODEL_VERSION:
        raise ModelFormatError("unknown model version")
    clf = make_classifier(data["algorithm"], **_decode(data["hyperparameters"]))
    clf._restore(_decode(data["parameters"]))
    model = MarkupClassifier(clf, data["task"])
    space = FeatureSpace.from_json(data["feature_space"])
    model.vectorizer_ = MarkupVectorizer.from_space(space, data["task"])
    std = _decode(data["standardizer"])
    model.standardizer_ = Standardizer()
    model.standardizer_.mean_ = std["mean"]
    model.standardizer_.scale_ = std["scale"]
    model.standardizer_.n_features_in_ = len(std["mean"])
    model.classifier_ = clf
    model.classes_ = clf.classes_
    model.provenance_ = _decode(data["provenance"])
    if space.dimension != model.standardizer_.n_features_in_:
        raise ModelFormatError("feature space and standardizer dimensions disagree")
    return model


def save_model(model: MarkupClassifier, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)


def load_model(path: Union[str, Path]) -> MarkupClassifier:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError("unknown model version") from exc
    return model_from_dict(data)
