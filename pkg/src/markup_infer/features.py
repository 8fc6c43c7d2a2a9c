"""Feature extraction: pld/tld one-hot, node-vocab and page-vocab blocks.

Vectors are laid out as four consecutive blocks::

    [ pld one-hot | tld one-hot | node-vocab | page-vocab ]

The two vocab blocks share one term dictionary.  Feature keys join the
owning node's type and the predicate (``s:Event/name``); any subtype of the
task's root type is generalised to the root so that keys never reveal the
class being predicted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dataset import LabeledInstance, property_part
from .ingest.nodes import NodeRecord
from .namespaces import RDF_TYPE, SCHEMA, compact, local_name
from .tasks import Task, parse_task
from .vocab import Vocabulary, load_vocabulary, split_composite

RDF_TYPE_KEY = "rdf:type"


def node_type(node: NodeRecord, vocab: Vocabulary, task: Task) -> Optional[str]:
    """The type used to prefix a node's plain predicates."""
    known = sorted(t for t in node.types if vocab.is_type(t))
    if any(vocab.is_subtype(t, task.root_type) for t in known):
        return task.root_type
    return known[0] if known else None


def _generalize(t: str, vocab: Vocabulary, task: Task) -> str:
    if vocab.is_type(t) and vocab.is_subtype(t, task.root_type):
        return task.root_type
    return t


def feature_key(predicate: str, node: Optional[NodeRecord], vocab: Vocabulary, task: Task,
                owner_type: Optional[str] = None) -> Optional[str]:
    """Feature key of one predicate on ``node``; None if it is not a feature.

    Only ``rdf:type`` and schema.org predicates yield keys; the task's
    target property never does.
    """
    if predicate == RDF_TYPE:
        return RDF_TYPE_KEY
    if not predicate.startswith(SCHEMA):
        return None
    if task.target_property and property_part(predicate) == task.target_property:
        return None
    parts = split_composite(predicate)
    if parts is not None:
        return compact(_generalize(parts[0], vocab, task)) + "/" + local_name(parts[1])
    if owner_type is None and node is not None:
        owner_type = node_type(node, vocab, task)
    if owner_type is None:
        return compact(predicate)
    return compact(owner_type) + "/" + local_name(predicate)


def node_keys(node: NodeRecord, vocab: Vocabulary, task: Task) -> Counter:
    owner = node_type(node, vocab, task)
    keys: Counter = Counter()
    for p, _ in node.statements:
        k = feature_key(p, node, vocab, task, owner)
        if k is not None:
            keys[k] += 1
    return keys


def page_keys(node: NodeRecord, page_context: Sequence[NodeRecord], vocab: Vocabulary, task: Task) -> Counter:
    keys: Counter = Counter()
    members = list(page_context)
    if node.node_id not in {n.node_id for n in members}:
        members.append(node)
    for n in members:
        keys.update(node_keys(n, vocab, task))
    return keys


@dataclass
class FeatureSpace:
    pld_index: dict
    tld_index: dict
    term_index: dict
    excluded_predicates: frozenset = field(default_factory=frozenset)

    @property
    def block_offsets(self) -> tuple:
        a = len(self.pld_index)
        b = a + len(self.tld_index)
        c = b + len(self.term_index)
        return (0, a, b, c)

    @property
    def dimension(self) -> int:
        return len(self.pld_index) + len(self.tld_index) + 2 * len(self.term_index)

    def feature_names(self) -> list:
        names = [""] * self.dimension
        o_pld, o_tld, o_node, o_page = self.block_offsets
        for k, i in self.pld_index.items():
            names[o_pld + i] = "pld=" + k
        for k, i in self.tld_index.items():
            names[o_tld + i] = "tld=" + k
        for k, i in self.term_index.items():
            names[o_node + i] = "node:" + k
            names[o_page + i] = "page:" + k
        return names

    def to_json(self) -> dict:
        return {"pld": sorted(self.pld_index, key=self.pld_index.get),
                "tld": sorted(self.tld_index, key=self.tld_index.get),
                "terms": sorted(self.term_index, key=self.term_index.get),
                "excluded_predicates": sorted(self.excluded_predicates)}

    @classmethod
    def from_json(cls, data: dict) -> "FeatureSpace":
        def index(xs):
            return {x: i for i, x in enumerate(xs)}
        return cls(index(data["pld"]), index(data["tld"]), index(data["terms"]),
                   frozenset(data.get("excluded_predicates", ())))


def build_feature_space(train: Sequence[LabeledInstance], vocab: Vocabulary, task: Task) -> FeatureSpace:
    if not train:
        raise ValueError("cannot build a feature space from an empty training set")
    plds, tlds, terms = set(), set(), set()
    for inst in train:
        plds.add(inst.node.pld)
        if inst.node.tld:
            tlds.add(inst.node.tld)
        terms.update(page_keys(inst.node, inst.page_context, vocab, task))

    def index(xs):
        return {x: i for i, x in enumerate(sorted(xs))}

    return FeatureSpace(index(plds), index(tlds), index(terms), task.excluded_predicates)


def _l2_block(counts: Counter, space: FeatureSpace) -> np.ndarray:
    block = np.zeros(len(space.term_index))
    for k, c in counts.items():
        i = space.term_index.get(k)
        if i is not None:
            block[i] = c
    norm = np.linalg.norm(block)
    return block / norm if norm > 0 else block


def node_vocab_vector(node: NodeRecord, space: FeatureSpace, vocab: Vocabulary, task: Task) -> np.ndarray:
    return _l2_block(node_keys(node, vocab, task), space)


def page_vocab_vector(node: NodeRecord, page_context: Sequence[NodeRecord], space: FeatureSpace,
                      vocab: Vocabulary, task: Task) -> np.ndarray:
    return _l2_block(page_keys(node, page_context, vocab, task), space)


def featurize(instance: LabeledInstance, space: FeatureSpace, vocab: Vocabulary, task: Task) -> np.ndarray:
    """Dense, un-standardized feature vector of one instance."""
    x = np.zeros(space.dimension)
    o_pld, o_tld, o_node, o_page = space.block_offsets
    node = instance.node
    if node.pld in space.pld_index:
        x[o_pld + space.pld_index[node.pld]] = 1.0
    if node.tld in space.tld_index:
        x[o_tld + space.tld_index[node.tld]] = 1.0
    x[o_node:o_page] = node_vocab_vector(node, space, vocab, task)
    x[o_page:] = page_vocab_vector(node, instance.page_context, space, vocab, task)
    return x


class MarkupVectorizer(TransformerMixin, BaseEstimator):
    """Turns labeled instances into sparse feature rows.

    Parameters
    ----------
    task : str
        ``"events"`` or ``"genre:<name>"``.
    vocabulary : str or None
        Path of a vocabulary snapshot; None uses the bundled one.
    """

    def __init__(self, task: str = "events", vocabulary: Optional[str] = None):
        self.task = task
        self.vocabulary = vocabulary

    def _setup(self):
        self.task_ = parse_task(self.task)
        self.vocab_ = load_vocabulary(self.vocabulary)

    def fit(self, instances: Sequence[LabeledInstance], y=None):
        self._setup()
        self.space_ = build_feature_space(list(instances), self.vocab_, self.task_)
        return self

    def transform(self, instances: Iterable[LabeledInstance]) -> sp.csr_matrix:
        check_is_fitted(self, "space_")
        rows = [sp.csr_matrix(featurize(i, self.space_, self.vocab_, self.task_)) for i in instances]
        if not rows:
            return sp.csr_matrix((0, self.space_.dimension))
        return sp.vstack(rows, format="csr")

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "space_")
        return np.asarray(self.space_.feature_names(), dtype=object)

    @classmethod
    def from_space(cls, space: FeatureSpace, task: str, vocabulary: Optional[str] = None) -> "MarkupVectorizer":
        vec = cls(task, vocabulary)
        vec._setup()
        vec.space_ = space
        return vec


class Standardizer(TransformerMixin, BaseEstimator):
    """Per-dimension ``(x - mean) / std`` with std 1 for constant dimensions."""

    def fit(self, X, y=None):
        X = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("Standardizer needs a non-empty 2-D array")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        # rounding leaves ~1e-17 spread on constant columns
        const = std <= 1e-10 * np.maximum(1.0, np.abs(self.mean_))
        self.scale_ = np.where(const, 1.0, std)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "scale_")
        X = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: got {X.shape[1]}, expected {self.n_features_in_}")
        return (X - self.mean_) / self.scale_
