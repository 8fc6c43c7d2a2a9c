"""Repair of common schema.org markup errors.

Two kinds of error are fixed: wrong namespaces (https, missing slash, extra
host labels such as ``www.``, host capitalisation) and wrong capitalisation
of type and property names.  Namespace fixing always runs first because the
casing lookup only works on canonical namespace IRIs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

from .ingest.nquads import Quad
from .namespaces import RDF_TYPE
from .vocab import Vocabulary, canonical_term

_SCHEMA_IRI = re.compile(r"^(https?)://((?:[^/]*\.)?)(schema\.org)(.*)$", re.IGNORECASE | re.DOTALL)


class Policy(str, Enum):
    DROP = "drop"
    KEEP = "keep"


@dataclass
class CleansingReport:
    quads_in: int = 0
    quads_out: int = 0
    namespace_fixes: int = 0
    casing_fixes: int = 0
    dropped_undefined: int = 0
    kept_undefined: int = 0

    def to_json(self) -> dict:
        return dict(vars(self))

    def merge(self, other: "CleansingReport") -> "CleansingReport":
        return CleansingReport(*(a + b for a, b in zip(vars(self).values(), vars(other).values())))


def is_schema_iri(iri: str) -> bool:
    return _SCHEMA_IRI.match(iri) is not None


def fix_namespace(iri: str) -> str:
    """Normalize a schema.org IRI to the ``http://schema.org/`` namespace.

    >>> fix_namespace("https://www.schema.org/Event")
    'http://schema.org/Event'
    >>> fix_namespace("http://schema.orgEvent")
    'http://schema.org/Event'

    Other IRIs are returned unchanged.
    """
    m = _SCHEMA_IRI.match(iri)
    if m is None:
        return iri
    rest = m.group(4)
    if not rest.startswith("/"):
        rest = "/" + rest
    return "http://schema.org" + rest


class _Fixer:
    def __init__(self, vocab: Vocabulary, report: CleansingReport):
        self.vocab = vocab
        self.report = report

    def term(self, iri: str, kind: str):
        """Return (fixed iri, defined?) and bump fix counters."""
        fixed = fix_namespace(iri)
        if fixed != iri:
            self.report.namespace_fixes += 1
        canon = canonical_term(fixed, self.vocab, kind)
        if canon is None:
            return fixed, False
        if canon != fixed:
            self.report.casing_fixes += 1
        return canon, True


def cleanse_quads(quads: Iterable[Quad], vocab: Vocabulary,
                  policy: Union[Policy, str] = Policy.DROP) -> tuple:
    """Fix namespaces and casing of schema.org predicates and ``rdf:type`` objects.

    Returns ``(quads, report)``.  Quads whose schema.org predicate or type
    object is still undefined after fixing are dropped under ``drop`` and
    passed through (counted in ``kept_undefined``) under ``keep``.  Literal
    objects and non-schema.org predicates are never touched.
    """
    policy = Policy(policy)
    report = CleansingReport()
    fixer = _Fixer(vocab, report)
    out = []
    for q in quads:
        report.quads_in += 1
        defined = True
        pred, obj = q.predicate, q.object
        if is_schema_iri(pred):
            pred, ok = fixer.term(pred, "property")
            defined &= ok
        if pred == RDF_TYPE and obj.kind == "iri" and is_schema_iri(obj.value):
            value, ok = fixer.term(obj.value, "type")
            defined &= ok
            if value != obj.value:
                obj = replace(obj, value=value)
        if not defined:
            if policy is Policy.DROP:
                report.dropped_undefined += 1
                continue
            report.kept_undefined += 1
        if pred != q.predicate or obj is not q.object:
            q = replace(q, predicate=pred, object=obj)
        out.append(q)
    report.quads_out = len(out)
    return out, report


__all__ = ["CleansingReport", "Policy", "cleanse_quads", "fix_namespace", "is_schema_iri"]
