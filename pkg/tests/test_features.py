import math
import random
from collections import Counter

import numpy as np
import pytest

from markup_infer.dataset import LabeledInstance
from markup_infer.features import (FeatureSpace, MarkupVectorizer, Standardizer, build_feature_space, feature_key,
                                   featurize, node_keys, node_vocab_vector, page_vocab_vector)
from markup_infer.ingest.nodes import NodeRecord, Statement
from markup_infer.ingest.nquads import Term
from markup_infer.namespaces import GENRE, RDF_TYPE, SCHEMA
from markup_infer.tasks import parse_task

EVENTS = parse_task("events")
DRAMA = parse_task("genre:Drama")


def rec(subject, types=(), props=(), pld="a.com", url=None):
    st_ = [Statement(RDF_TYPE, Term.iri(SCHEMA + t)) for t in types]
    st_ += [Statement(p if "://" in p else SCHEMA + p, Term.literal("v")) for p in props]
    return NodeRecord(subject, url or f"http://{pld}/page", pld, "." + pld.rsplit(".", 1)[-1], tuple(st_))


def space_for(instances, vocab, task=EVENTS):
    return build_feature_space(instances, vocab, task)


# ---------------------------------------------------------------- keys


def test_example_node_keys(example_page, vocab):
    node, _ = example_page
    assert node_keys(node, vocab, EVENTS) == {"rdf:type": 1, "s:Event/name": 1, "s:Event/location": 1}


def test_composite_subtype_is_generalized(vocab):
    assert feature_key(SCHEMA + "BusinessEvent/name", None, vocab, EVENTS) == "s:Event/name"
    assert feature_key(SCHEMA + "Organization/url", None, vocab, EVENTS) == "s:Organization/url"


def test_plain_predicate_takes_node_type(vocab):
    n = rec("_:m", ["MusicEvent"], ["name"])
    assert feature_key(SCHEMA + "name", n, vocab, EVENTS) == "s:Event/name"
    org = rec("_:o", ["Organization"], ["name"])
    assert feature_key(SCHEMA + "name", org, vocab, EVENTS) == "s:Organization/name"


def test_target_predicate_and_foreign_namespace_excluded(vocab):
    m = rec("_:m", ["Movie"], ["genre", "name"])
    assert feature_key(GENRE, m, vocab, DRAMA) is None
    assert feature_key(SCHEMA + "Movie/genre", m, vocab, DRAMA) is None
    assert feature_key("http://ogp.me/ns#title", m, vocab, DRAMA) is None
    assert feature_key(RDF_TYPE, m, vocab, DRAMA) == "rdf:type"


def test_example_page_vector(example_page, vocab):
    node, nodes = example_page
    inst = LabeledInstance(node, "Other", tuple(nodes))
    space = space_for([inst], vocab)
    block = page_vocab_vector(node, nodes, space, vocab, EVENTS)
    expected = {"rdf:type": 2, "s:Event/name": 1, "s:Event/location": 1, "s:Organization/url": 1}
    norm = math.sqrt(sum(v * v for v in expected.values()))
    for k, i in space.term_index.items():
        assert block[i] == pytest.approx(expected.get(k, 0) / norm, abs=1e-12)


def test_example_node_vector(example_page, vocab):
    node, nodes = example_page
    space = space_for([LabeledInstance(node, "Other", tuple(nodes))], vocab)
    block = node_vocab_vector(node, space, vocab, EVENTS)
    for k in ("rdf:type", "s:Event/name", "s:Event/location"):
        assert block[space.term_index[k]] == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert block[space.term_index["s:Organization/url"]] == 0


def test_repeated_type_counts(vocab):
    n = NodeRecord("_:x", "http://a.com/", "a.com", ".com",
                   (Statement(RDF_TYPE, Term.iri(SCHEMA + "Event")), Statement(RDF_TYPE, Term.iri(SCHEMA + "Thing")),
                    Statement(SCHEMA + "name", Term.literal("n"))))
    space = space_for([LabeledInstance(n, "A", (n,))], vocab)
    block = node_vocab_vector(n, space, vocab, EVENTS)
    assert block[space.term_index["rdf:type"]] == pytest.approx(2 / math.sqrt(5), abs=1e-12)
    assert block[space.term_index["s:Event/name"]] == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_zero_block_and_degenerate_page(vocab):
    train = rec("_:a", ["Event"], ["name"])
    space = space_for([LabeledInstance(train, "A", (train,))], vocab)
    stranger = rec("_:b", [], ["http://ogp.me/ns#title"], pld="z.org")
    assert not node_vocab_vector(stranger, space, vocab, EVENTS).any()
    assert np.array_equal(page_vocab_vector(train, [train], space, vocab, EVENTS),
                          node_vocab_vector(train, space, vocab, EVENTS))


# ---------------------------------------------------------------- space and vectors


def _random_instances(seed, n=40):
    rng = random.Random(seed)
    props = ["name", "startDate", "location", "url", "description", "organizer", "offers"]
    instances = []
    for i in range(n):
        pld = rng.choice(["a.com", "b.org", "c.de", "d.co.uk"])
        url = f"http://{pld}/{rng.randrange(6)}"
        page = [rec(f"_:p{i}_{j}", [rng.choice(["MusicEvent", "Organization", "Place"])],
                    rng.sample(props, rng.randint(0, 4)), pld, url) for j in range(rng.randint(0, 3))]
        n_ = rec(f"_:n{i}", [rng.choice(["MusicEvent", "SportsEvent", "ComedyEvent"])],
                 [rng.choice(props) for _ in range(rng.randint(0, 6))], pld, url)
        instances.append(LabeledInstance(n_, "A", tuple(page + [n_])))
    return instances


def test_space_enumeration_and_determinism(vocab):
    a = rec("_:a", ["Event"], ["name"], "a.com")
    b = rec("_:b", ["Event"], ["url"], "b.org")
    insts = [LabeledInstance(a, "A", (a,)), LabeledInstance(b, "B", (b,))]
    s1, s2 = space_for(insts, vocab), space_for(list(reversed(insts)), vocab)
    assert s1 == s2
    assert s1.pld_index == {"a.com": 0, "b.org": 1} and s1.tld_index == {".com": 0, ".org": 1}
    assert s1.dimension == 2 + 2 + 2 * len(s1.term_index)
    assert FeatureSpace.from_json(s1.to_json()) == s1


def test_empty_training_rejected(vocab):
    with pytest.raises(ValueError):
        build_feature_space([], vocab, EVENTS)


def test_vector_invariants(vocab):
    insts = _random_instances(1)
    space = space_for(insts, vocab)
    o_pld, o_tld, o_node, o_page = space.block_offsets
    subtype_names = {"MusicEvent", "SportsEvent", "ComedyEvent"}
    assert not any(n in k for k in space.term_index for n in subtype_names)
    for inst in insts + _random_instances(2):
        x = featurize(inst, space, vocab, EVENTS)
        for block in (x[o_pld:o_tld], x[o_tld:o_node]):
            assert np.count_nonzero(block) <= 1 and set(block[block != 0]) <= {1.0}
        for block in (x[o_node:o_page], x[o_page:]):
            norm = np.linalg.norm(block)
            assert norm == 0 or abs(norm - 1) <= 1e-12


def test_brute_force_recount(vocab):
    """Rebuild the page block by walking raw statements."""
    insts = _random_instances(3)
    space = space_for(insts, vocab)
    o_page = space.block_offsets[3]
    for inst in insts:
        counts = Counter()
        for member in inst.page_context:
            types = [o.value for p, o in member.statements if p == RDF_TYPE]
            is_event = any(vocab.is_subtype(t, SCHEMA + "Event") for t in types)
            owner = "s:Event" if is_event else "s:" + types[0].rsplit("/", 1)[-1]
            for p, _ in member.statements:
                counts["rdf:type" if p == RDF_TYPE else owner + "/" + p.rsplit("/", 1)[-1]] += 1
        want = np.zeros(len(space.term_index))
        for k, c in counts.items():
            want[space.term_index[k]] = c
        want /= np.linalg.norm(want)
        assert np.allclose(featurize(inst, space, vocab, EVENTS)[o_page:], want, atol=1e-12)


def test_page_order_and_unseen_pld(vocab):
    insts = _random_instances(4)
    space = space_for(insts, vocab)
    inst = insts[0]
    shuffled = LabeledInstance(inst.node, inst.label, tuple(reversed(inst.page_context)))
    assert np.array_equal(featurize(inst, space, vocab, EVENTS), featurize(shuffled, space, vocab, EVENTS))
    foreign = rec("_:f", ["MusicEvent"], ["name"], "unseen.example")
    x = featurize(LabeledInstance(foreign, "A", (foreign,)), space, vocab, EVENTS)
    assert not x[:space.block_offsets[2]].any()


def test_no_genre_dimension(vocab):
    movies = [rec(f"_:m{i}", ["Movie"], ["genre", "name", "Movie/genre"]) for i in range(3)]
    space = space_for([LabeledInstance(m, "Drama", (m,)) for m in movies], vocab, DRAMA)
    assert not any("genre" in k for k in space.term_index)


def test_vectorizer_matches_featurize(vocab):
    insts = _random_instances(5)
    vec = MarkupVectorizer().fit(insts)
    X = vec.transform(insts).toarray()
    for row, inst in zip(X, insts):
        assert np.array_equal(row, featurize(inst, vec.space_, vocab, EVENTS))
    assert len(vec.get_feature_names_out()) == X.shape[1]


# ---------------------------------------------------------------- standardizer


def test_standardizer_constant_and_two_point():
    s = Standardizer().fit(np.full((4, 1), 0.5))
    assert s.scale_[0] == 1.0 and not s.transform(np.full((4, 1), 0.5)).any()
    s = Standardizer().fit(np.array([[0.0], [2.0]]))
    assert s.mean_[0] == 1 and s.scale_[0] == 1
    assert s.transform(np.array([[0.0], [2.0]])).ravel().tolist() == [-1.0, 1.0]


def test_standardizer_moments():
    X = np.random.default_rng(0).normal(3, 7, size=(50, 20))
    Z = Standardizer().fit_transform(X)
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(Z.var(axis=0) - 1) < 1e-9)


def test_standardizer_dimension_mismatch():
    s = Standardizer().fit(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        s.transform(np.zeros((1, 3)))
