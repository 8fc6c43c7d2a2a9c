"""schema.org vocabulary: types, properties, domains/ranges and hierarchy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .namespaces import SCHEMA

DEFAULT_SNAPSHOT = "schemaorg.json"


class VocabularyError(ValueError):
    pass


class UnknownTermError(KeyError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """An immutable, validated vocabulary snapshot.

    Types and properties are kept in separate case-folding maps: schema.org
    reuses names across the two kinds (``Event``/``event``,
    ``Review``/``review``), so a single case-insensitive key cannot be
    injective over both.
    """

    version: str
    parents: Mapping[str, tuple]
    domain_of: Mapping[str, frozenset]
    range_of: Mapping[str, frozenset]
    type_casing: Mapping[str, str] = field(repr=False)
    property_casing: Mapping[str, str] = field(repr=False)

    @property
    def types(self) -> frozenset:
        return frozenset(self.parents)

    @property
    def properties(self) -> frozenset:
        return frozenset(self.domain_of)

    def is_type(self, iri: str) -> bool:
        return iri in self.parents

    def is_property(self, iri: str) -> bool:
        return iri in self.domain_of

    def ancestors(self, t: str) -> frozenset:
        if t not in self.parents:
            raise UnknownTermError(t)
        return _ancestors(self, t)

    def is_subtype(self, t1: str, t2: str) -> bool:
        """True iff ``t1 == t2`` or ``t1`` is a transitive descendant of ``t2``."""
        if t2 not in self.parents:
            raise UnknownTermError(t2)
        return t1 == t2 or t2 in self.ancestors(t1)

    def roots(self, t: str) -> frozenset:
        return frozenset(a for a in self.ancestors(t) | {t} if not self.parents[a])

    def subtypes(self, t: str, proper: bool = True) -> list:
        found = [x for x in self.parents if self.is_subtype(x, t)]
        if proper:
            found = [x for x in found if x != t]
        return sorted(found)

    def children(self, t: str) -> list:
        return sorted(x for x, ps in self.parents.items() if t in ps)

    def canonical_term(self, raw: str, kind: Optional[str] = None) -> Optional[str]:
        return canonical_term(raw, self, kind)

    def __hash__(self) -> int:
        return hash(self.version)


@lru_cache(maxsize=4096)
def _ancestors(vocab: Vocabulary, t: str) -> frozenset:
    seen = set()
    stack = list(vocab.parents[t])
    while stack:
        p = stack.pop()
        if p not in seen:
            seen.add(p)
            stack.extend(vocab.parents[p])
    return frozenset(seen)


def _check_acyclic(parents: Mapping[str, tuple]) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(parents, WHITE)
    for start in parents:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(parents[start]))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
            elif color[nxt] == GREY:
                raise VocabularyError(f"hierarchy cycle through {nxt}")
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(parents[nxt])))


def _casing_map(iris: Iterable[str], kind: str) -> dict:
    out: dict = {}
    for iri in iris:
        key = iri.lower()
        if key in out and out[key] != iri:
            raise VocabularyError(f"duplicate canonical key for {kind}s: {out[key]} / {iri}")
        out[key] = iri
    return out


def vocabulary_from_dict(data: Mapping) -> Vocabulary:
    parents: dict = {}
    for entry in data.get("types", []):
        iri = entry["iri"]
        if iri in parents:
            raise VocabularyError(f"duplicate type {iri}")
        parents[iri] = tuple(entry.get("parents", ()))
    for t, ps in parents.items():
        for p in ps:
            if p not in parents:
                raise VocabularyError(f"type {t} has undeclared parent {p}")
    _check_acyclic(parents)

    domain_of: dict = {}
    range_of: dict = {}
    for entry in data.get("properties", []):
        iri = entry["iri"]
        if iri in domain_of:
            raise VocabularyError(f"duplicate property {iri}")
        domain_of[iri] = frozenset(entry.get("domain", ()))
        range_of[iri] = frozenset(entry.get("range", ()))

    return Vocabulary(
        version=str(data.get("version", "unversioned")),
        parents=parents,
        domain_of=domain_of,
        range_of=range_of,
        type_casing=_casing_map(parents, "type"),
        property_casing=_casing_map(domain_of, "property"),
    )


def load_vocabulary(path: Union[str, Path, None] = None) -> Vocabulary:
    """Load a snapshot file (the bundled one when ``path`` is None)."""
    if path is None:
        return _bundled()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise VocabularyError(f"cannot read vocabulary snapshot {path}: {exc}") from exc
    return vocabulary_from_dict(data)


@lru_cache(maxsize=1)
def _bundled() -> Vocabulary:
    text = resources.files("markup_infer.data").joinpath(DEFAULT_SNAPSHOT).read_text("utf-8")
    return vocabulary_from_dict(json.loads(text))


def split_composite(iri: str) -> Optional[tuple]:
    """Split ``http://schema.org/Event/name`` into ``(type part, property part)``."""
    if not iri.startswith(SCHEMA):
        return None
    rest = iri[len(SCHEMA):]
    if "/" not in rest.strip("/"):
        return None
    head, _, tail = rest.rstrip("/").rpartition("/")
    return SCHEMA + head, SCHEMA + tail


def canonical_term(raw: str, vocab: Vocabulary, kind: Optional[str] = None) -> Optional[str]:
    """Return the canonical casing of a vocabulary IRI, or None if undefined.

    ``kind`` restricts the lookup to ``"type"`` or ``"property"``.  Without
    it, an exact match wins; a name that only matches case-insensitively
    resolves to a type when its local name starts upper-case and to a
    property otherwise.  Composite ``<Type>/<property>`` predicates are
    canonicalized part by part.
    """
    key = raw.lower()
    t = vocab.type_casing.get(key) if kind in (None, "type") else None
    p = vocab.property_casing.get(key) if kind in (None, "property") else None
    if t and p:
        if raw in (t, p):
            return raw
        local = raw[len(SCHEMA):] if raw.startswith(SCHEMA) else raw
        return t if local[:1].isupper() else p
    if t or p:
        return t or p
    if kind in (None, "property"):
        parts = split_composite(raw)
        if parts is not None:
            t_part = vocab.type_casing.get(parts[0].lower())
            p_part = vocab.property_casing.get(parts[1].lower())
            if t_part and p_part:
                return t_part + "/" + p_part[len(SCHEMA):]
    return None


def is_subtype(t1: str, t2: str, vocab: Vocabulary) -> bool:
    if t1 not in vocab.parents:
        raise UnknownTermError(t1)
    return vocab.is_subtype(t1, t2)
