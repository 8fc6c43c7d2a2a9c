from collections import Counter

import pytest

from markup_infer.cleansing import cleanse_quads
from markup_infer.dataset import split_train_test
from markup_infer.evaluation import macro_f1
from markup_infer.learn import DecisionTree, RandomForest
from markup_infer.model import MarkupClassifier
from markup_infer.synthetic import (SyntheticCorpusSpec, generate_synthetic_corpus, write_synthetic_corpus,
                                    zipf_weights)
from markup_infer.tasks import OTHER

from conftest import synthetic_dataset


def _score(spec, vocab, classifier, seed=0):
    ds, _ = synthetic_dataset(spec, vocab)
    split = split_train_test(ds.sample("stratified", seed), 0.8, seed)
    model = MarkupClassifier(classifier).fit(split.train)
    return macro_f1([i.label for i in split.test], list(model.predict(split.test)))


def test_deterministic_per_seed():
    spec = SyntheticCorpusSpec(nodes_per_class=20, seed=3)
    assert generate_synthetic_corpus(spec) == generate_synthetic_corpus(spec)
    other = SyntheticCorpusSpec(nodes_per_class=20, seed=4)
    assert generate_synthetic_corpus(spec)[0] != generate_synthetic_corpus(other)[0]


def test_gold_labels_match_spec():
    spec = SyntheticCorpusSpec(nodes_per_class=30, generic_nodes=10, seed=1)
    _, gold = generate_synthetic_corpus(spec)
    labeled = Counter(g["label"] for g in gold if g["labeled"])
    assert labeled == {c: 30 for c in list(spec.classes) + [OTHER]}
    assert sum(not g["labeled"] for g in gold) == 10


def test_signal_zero_is_chance(vocab):
    spec = SyntheticCorpusSpec(nodes_per_class=150, signal_strength=0.0, seed=2)
    f1 = _score(spec, vocab, RandomForest(n_estimators=10, random_state=0))
    # 8 classes, 30 test items each: chance is 1/8 with noise of a few points
    assert f1 < 0.25


def test_signal_one_is_separable(vocab):
    spec = SyntheticCorpusSpec(nodes_per_class=60, signal_strength=1.0, dialect_keys=1, seed=5)
    assert _score(spec, vocab, DecisionTree()) == 1.0


def test_zipf_top_mass():
    w = zipf_weights(50, 2.0)
    assert w.sum() == pytest.approx(1.0) and w[0] > 0.30
    spec = SyntheticCorpusSpec(classes=("MusicEvent",), other_types=(), nodes_per_class=3000, plds_per_class=50,
                               shared_plds=0, skew=2.0, signal_strength=1.0, generic_nodes=0, seed=0)
    quads, gold = generate_synthetic_corpus(spec)
    pages = Counter(g["url"].split("/")[2] for g in gold)
    assert max(pages.values()) / len(gold) > 0.30


@pytest.mark.parametrize("kw", [{"signal_strength": 1.5}, {"signal_strength": {"MusicEvent": 0.5}},
                                {"pld_affinity": -0.1}, {"task": "books"},
                                {"dialect_keys": 0}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SyntheticCorpusSpec(**kw)


def test_per_class_signal(vocab):
    strengths = {c: 1.0 for c in SyntheticCorpusSpec().classes}
    strengths[OTHER] = 1.0
    spec = SyntheticCorpusSpec(nodes_per_class=40, signal_strength=strengths, seed=0)
    assert spec.signal("FoodEvent") == 1.0 and spec.signal("MusicEvent") == 1.0


def test_write_with_sidecar(tmp_path):
    spec = SyntheticCorpusSpec.for_movies(nodes_per_class=10, seed=0)
    out, gold = write_synthetic_corpus(spec, tmp_path / "movies.nq")
    first = gold.read_text().splitlines()[0]
    assert '"task": "movies"' in first
    assert out.read_text().count("\n") == len(generate_synthetic_corpus(spec)[0])


def test_cleansing_noise_is_repaired(vocab):
    clean, _ = generate_synthetic_corpus(SyntheticCorpusSpec(nodes_per_class=40, seed=7))
    noisy, _ = generate_synthetic_corpus(SyntheticCorpusSpec(nodes_per_class=40, noise_rate=0.3, seed=7))
    assert noisy != clean
    repaired, report = cleanse_quads(noisy, vocab, "drop")
    assert repaired == clean and report.namespace_fixes > 0 and report.casing_fixes > 0


def test_undefined_terms_are_dropped(vocab):
    clean, _ = generate_synthetic_corpus(SyntheticCorpusSpec(nodes_per_class=40, seed=8))
    dirty, _ = generate_synthetic_corpus(SyntheticCorpusSpec(nodes_per_class=40, undefined_rate=0.2, seed=8))
    assert len(dirty) > len(clean)
    repaired, report = cleanse_quads(dirty, vocab, "drop")
    assert repaired == clean and report.dropped_undefined == len(dirty) - len(clean)
