"""Group quads into per-page entity nodes and profile them."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

from ..namespaces import RDF_TYPE
from ..vocab import Vocabulary
from .domains import extract_pld_tld
from .nquads import Quad, Term


class Statement(NamedTuple):
    predicate: str
    object: Term


@dataclass(frozen=True)
class NodeRecord:
    """All outgoing statements of one subject on one page.

    Identity is ``(subject, url)``: blank-node labels are page-scoped, so the
    same label on two pages denotes two different nodes.
    """

    subject: str
    url: str
    pld: str
    tld: str
    statements: tuple = ()

    @property
    def node_id(self) -> tuple:
        return (self.subject, self.url)

    @property
    def types(self) -> tuple:
        return tuple(o.value for p, o in self.statements if p == RDF_TYPE and o.kind == "iri")

    def values(self, predicate: str) -> list:
        return [o for p, o in self.statements if p == predicate]

    def quads(self) -> Iterator[Quad]:
        for p, o in self.statements:
            yield Quad(self.subject, p, o, self.url)

    def to_json(self) -> dict:
        stmts = []
        for p, o in self.statements:
            entry = {"p": p, "o_kind": o.kind, "o": o.value}
            if o.lang is not None:
                entry["lang"] = o.lang
            if o.datatype is not None:
                entry["dt"] = o.datatype
            stmts.append(entry)
        return {"subject": self.subject, "url": self.url, "pld": self.pld,
                "tld": self.tld, "statements": stmts}

    @classmethod
    def from_json(cls, data: dict) -> "NodeRecord":
        stmts = tuple(
            Statement(s["p"], Term(s["o_kind"], s["o"], s.get("lang"), s.get("dt")))
            for s in data["statements"]
        )
        return cls(data["subject"], data["url"], data["pld"], data["tld"], stmts)


def assemble_nodes(quads: Iterable[Quad]) -> list:
    """Group quads by ``(subject, source_url)``.

    Records come out in order of first appearance and keep statement order.
    """
    groups: dict = {}
    for q in quads:
        groups.setdefault((q.subject, q.source_url), []).append(Statement(q.predicate, q.object))
    nodes = []
    for (subject, url), stmts in groups.items():
        pld, tld, _ = extract_pld_tld(url)
        nodes.append(NodeRecord(subject, url, pld, tld, tuple(stmts)))
    return nodes


def pages(nodes: Iterable[NodeRecord]) -> dict:
    """Index nodes by page URL, preserving order."""
    out: dict = {}
    for n in nodes:
        out.setdefault(n.url, []).append(n)
    return out


def write_nodes_jsonl(nodes: Iterable[NodeRecord], path: Union[str, Path]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for node in nodes:
            fh.write(json.dumps(node.to_json(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_nodes_jsonl(path: Union[str, Path]) -> list:
    with open(path, encoding="utf-8") as fh:
        return [NodeRecord.from_json(json.loads(line)) for line in fh if line.strip()]


class Summary(NamedTuple):
    min: float
    max: float
    mean: float
    median: float


@dataclass(frozen=True)
class CorpusStats:
    total_quads: int
    total_nodes: int
    quads_per_node: Summary
    distinct_properties_per_node: Summary
    empty: bool = False

    def to_json(self) -> dict:
        return {
            "total_quads": self.total_quads,
            "total_nodes": self.total_nodes,
            "quads_per_node": self.quads_per_node._asdict(),
            "distinct_properties_per_node": self.distinct_properties_per_node._asdict(),
            "empty": self.empty,
        }


_ZERO = Summary(0, 0, 0.0, 0)


def summarize(values: Sequence[int]) -> Summary:
    if not values:
        return _ZERO
    return Summary(min(values), max(values), statistics.fmean(values), statistics.median_low(values))


def node_matches(node: NodeRecord, type_iri: Optional[str], vocab: Optional[Vocabulary]) -> bool:
    if type_iri is None:
        return True
    for t in node.types:
        if t == type_iri:
            return True
        if vocab is not None and vocab.is_type(t) and vocab.is_subtype(t, type_iri):
            return True
    return False


def profile_corpus(nodes: Iterable[NodeRecord], type_iri: Optional[str] = None,
                   vocab: Optional[Vocabulary] = None) -> CorpusStats:
    """Per-node quad and distinct-property counts over nodes of ``type_iri``.

    Medians use the lower-median convention.  With no matching nodes all
    figures are zero and ``empty`` is set.
    """
    sizes, distinct = [], []
    for node in nodes:
        if node_matches(node, type_iri, vocab):
            sizes.append(len(node.statements))
            distinct.append(len({p for p, _ in node.statements}))
    if not sizes:
        return CorpusStats(0, 0, _ZERO, _ZERO, empty=True)
    return CorpusStats(sum(sizes), len(sizes), summarize(sizes), summarize(distinct))
