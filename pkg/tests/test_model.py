import json

import numpy as np
import pytest

from markup_infer.dataset import split_train_test
from markup_infer.learn import DecisionTree, GaussianNB, LinearSVM, RandomForest
from markup_infer.model import MarkupClassifier, ModelFormatError, as_instances, load_model, save_model
from markup_infer.synthetic import SyntheticCorpusSpec

from conftest import synthetic_dataset


@pytest.fixture(scope="module")
def split(vocab):
    ds, _ = synthetic_dataset(SyntheticCorpusSpec(nodes_per_class=40, seed=11), vocab)
    return split_train_test(ds.sample("pld", 0), 0.8, 0)


@pytest.mark.parametrize("clf", [GaussianNB(), DecisionTree(), RandomForest(n_estimators=5, random_state=1),
                                 LinearSVM(max_iter=30, random_state=1)], ids=lambda c: type(c).__name__)
def test_round_trip_on_100_vectors(split, clf, tmp_path):
    model = MarkupClassifier(clf).fit(split.train, provenance={"seed": 0})
    path = tmp_path / "m.json"
    save_model(model, path)
    back = load_model(path)
    probes = (split.test + split.train)[:100]
    assert len(probes) == 100
    assert np.array_equal(model.predict(probes), back.predict(probes))
    assert np.array_equal(model.predict_scores(probes), back.predict_scores(probes))
    X = np.random.default_rng(0).normal(size=(100, model.feature_space.dimension))
    assert np.array_equal(model.predict_vectors(X), back.predict_vectors(X))
    assert back.provenance_["seed"] == 0 and "vocabulary_version" in back.provenance_
    # a second save is byte-identical
    again = tmp_path / "again.json"
    save_model(back, again)
    assert again.read_bytes() == path.read_bytes()


def test_file_layout(split, tmp_path):
    model = MarkupClassifier(DecisionTree()).fit(split.train)
    save_model(model, tmp_path / "m.json")
    data = json.loads((tmp_path / "m.json").read_text())
    assert data["version"] == 1 and data["algorithm"] == "dtree"
    assert {"hyperparameters", "classes", "feature_space", "standardizer", "parameters", "provenance"} <= set(data)
    assert isinstance(data["standardizer"]["mean"]["data"][0], str)


def test_predictions_come_from_class_list(split):
    model = MarkupClassifier(RandomForest(n_estimators=5, random_state=0)).fit(split.train)
    zero = np.zeros((3, model.feature_space.dimension))
    labels = model.predict_vectors(zero)
    assert set(labels) <= set(model.classes_)
    assert len(set(labels)) == 1


def test_corrupted_files(tmp_path, split):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 99}')
    with pytest.raises(ModelFormatError, match="unknown model version"):
        load_model(bad)
    bad.write_bytes(b"\x89PNG\r\n")
    with pytest.raises(ModelFormatError, match="unknown model version"):
        load_model(bad)


def test_dimension_mismatch(split):
    model = MarkupClassifier(GaussianNB()).fit(split.train)
    with pytest.raises(ValueError):
        model.predict_vectors(np.zeros((1, model.feature_space.dimension + 1)))


def test_as_instances_uses_page_context(split):
    nodes = [i.node for i in split.test]
    wrapped = as_instances(nodes[:3], nodes)
    for inst in wrapped:
        assert inst.label is None and inst.node in inst.page_context
        assert all(n.url == inst.node.url for n in inst.page_context)
