"""Synthetic markup corpora with controllable class signal.

Each labeled node draws its pld from a Zipf-skewed pool.  With probability
``signal_strength * pld_affinity`` the pool is specific to the node's class,
otherwise it is shared by all classes.  With probability ``signal_strength``
the node carries one class-discriminative predicate; which of the class's
alternatives is used is fixed per pld (a site "dialect").  Every pld also has
a fixed template of class-neutral optional predicates.  At signal strength 0
the classes are therefore indistinguishable.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from ._random import derive_rng
from .ingest.nquads import Quad, Term, write_nquads
from .namespaces import GENRE, NAME, RDF_TYPE, SCHEMA
from .tasks import OTHER

HEAD_EVENT_TYPES = ("PublicationEvent", "MusicEvent", "ScreeningEvent", "ComedyEvent",
                    "TheaterEvent", "EducationEvent", "VisualArtsEvent")
OTHER_EVENT_TYPES = ("BusinessEvent", "SportsEvent", "Festival", "FoodEvent")

DIALECT_KEYS = {
    "PublicationEvent": ("publishedOn", "isLiveBroadcast", "encodingFormat", "contentUrl"),
    "MusicEvent": ("performer", "composer", "byArtist", "performers"),
    "ScreeningEvent": ("videoFormat", "subtitleLanguage", "director", "trailer"),
    "ComedyEvent": ("actor", "keywords", "contentRating", "about"),
    "TheaterEvent": ("workPerformed", "translator", "actors", "recordedIn"),
    "EducationEvent": ("instructor", "courseMode", "headline", "text"),
    "VisualArtsEvent": ("workFeatured", "creator", "thumbnailUrl", "dateCreated"),
    "BusinessEvent": ("attendee", "brand"),
    "SportsEvent": ("member", "identifier"),
    "Festival": ("subEvents", "review"),
    "FoodEvent": ("priceRange", "openingHours"),
    # movie genres
    "Drama": ("countryOfOrigin", "musicBy"),
    "Comedy": ("contentRating", "keywords"),
    "Action": ("trailer", "productionCompany"),
    "Thriller": ("review", "copyrightYear"),
    "Romance": ("subtitleLanguage", "translator"),
    "Documentary": ("about", "text"),
    "Adventure": ("dateCreated", "creator"),
}
COMMON_KEYS = {
    "events": (("name", 1.0), ("startDate", 0.9), ("location", 0.7), ("url", 0.6),
               ("description", 0.5), ("image", 0.4), ("endDate", 0.3), ("offers", 0.3)),
    "movies": (("name", 1.0), ("actor", 0.8), ("director", 0.7), ("image", 0.6), ("url", 0.5),
               ("description", 0.5), ("duration", 0.4), ("datePublished", 0.4), ("aggregateRating", 0.3)),
}
TEMPLATE_KEYS = {
    "events": ("eventStatus", "doorTime", "organizer", "typicalAgeRange", "inLanguage",
               "isAccessibleForFree", "sponsor", "audience", "duration", "maximumAttendeeCapacity",
               "remainingAttendeeCapacity", "funder", "contributor", "previousStartDate", "superEvent",
               "subEvent"),
    "movies": ("interactionCount", "thumbnailUrl", "dateModified", "inLanguage", "author", "publisher",
               "alternateName", "sameAs", "headline", "dateCreated"),
}
GENRES = ("Drama", "Comedy", "Action", "Thriller", "Romance", "Documentary", "Adventure")
TLDS = (".com", ".com", ".com", ".org", ".de", ".co.uk", ".it", ".fr", ".net", ".es")


@dataclass
class SyntheticCorpusSpec:
    task: str = "events"
    classes: Sequence[str] = HEAD_EVENT_TYPES
    other_types: Sequence[str] = OTHER_EVENT_TYPES
    nodes_per_class: int = 200
    plds_per_class: int = 20
    shared_plds: int = 20
    skew: float = 1.5
    signal_strength: Union[float, Mapping[str, float]] = 0.7
    pld_affinity: float = 1.0
    template_size: int = 2
    dialect_keys: int = 4
    listing_rate: float = 0.4
    listing_size: int = 4
    generic_nodes: int = 50
    multi_typed: int = 0
    noise_rate: float = 0.0
    undefined_rate: float = 0.0
    composite_rate: float = 0.5
    seed: int = 0

    def __post_init__(self):
        strengths = (self.signal_strength.values() if isinstance(self.signal_strength, Mapping)
                     else [self.signal_strength])
        if not all(0.0 <= float(x) <= 1.0 for x in strengths):
            raise ValueError("signal_strength must lie in [0, 1]")
        if isinstance(self.signal_strength, Mapping):
            self.signal_strength = dict(self.signal_strength)
            needed = list(self.classes) + ([OTHER] if self.other_types else [])
            missing = [c for c in needed if c not in self.signal_strength]
            if missing:
                raise ValueError(f"no signal strength for classes {missing}")
        if self.dialect_keys < 1:
            raise ValueError("dialect_keys must be >= 1")
        if not 0.0 <= self.pld_affinity <= 1.0:
            raise ValueError("pld_affinity must lie in [0, 1]")
        if self.task not in ("events", "movies"):
            raise ValueError("task must be 'events' or 'movies'")
        self.classes = tuple(self.classes)
        self.other_types = tuple(self.other_types)

    def signal(self, name: str) -> float:
        """Signal strength for a class label or one of the ``Other`` subtypes."""
        if not isinstance(self.signal_strength, Mapping):
            return float(self.signal_strength)
        if name in self.signal_strength:
            return float(self.signal_strength[name])
        return float(self.signal_strength[OTHER])

    @classmethod
    def for_movies(cls, **kw) -> "SyntheticCorpusSpec":
        kw.setdefault("classes", GENRES)
        kw.setdefault("other_types", ())
        kw.setdefault("generic_nodes", 0)
        return cls(task="movies", **kw)

    def to_json(self) -> dict:
        d = asdict(self)
        d["classes"], d["other_types"] = list(self.classes), list(self.other_types)
        return d


def zipf_weights(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1, dtype=float) ** s
    return w / w.sum()


def _slug(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


@dataclass
class _Site:
    pld: str
    template: tuple
    dialect: dict = field(default_factory=dict)


class _Generator:
    def __init__(self, spec: SyntheticCorpusSpec):
        self.spec = spec
        self.rng = derive_rng(spec.seed, "synthetic")
        # separate stream, so noisy and clean corpora share everything else
        self.noise_rng = derive_rng(spec.seed, "noise")
        self.quads: list = []
        self.gold: list = []
        self.sites: dict = {}
        self.listing: dict = {}
        self.page_count: dict = {}
        self.bnode = 0

    def site(self, pld: str) -> _Site:
        s = self.sites.get(pld)
        if s is None:
            r = derive_rng(self.spec.seed, "site", pld)
            keys = TEMPLATE_KEYS[self.spec.task]
            k = min(self.spec.template_size, len(keys))
            template = tuple(keys[i] for i in sorted(r.choice(len(keys), size=k, replace=False)))
            s = self.sites[pld] = _Site(pld, template)
        return s

    def dialect(self, site: _Site, cls: str) -> str:
        if cls not in site.dialect:
            options = DIALECT_KEYS[cls][:self.spec.dialect_keys]
            site.dialect[cls] = options[int(derive_rng(self.spec.seed, "dialect", site.pld, cls).integers(len(options)))]
        return site.dialect[cls]

    def pools(self):
        spec = self.spec
        self.class_pools = {}
        pool_classes = list(spec.classes) + ([OTHER] if spec.other_types else [])
        for c in pool_classes:
            r = derive_rng(spec.seed, "pool", c)
            self.class_pools[c] = [f"{_slug(c)}{j}{TLDS[int(r.integers(len(TLDS)))]}"
                                   for j in range(spec.plds_per_class)]
        r = derive_rng(spec.seed, "pool", "shared")
        self.shared_pool = [f"{spec.task}hub{j}{TLDS[int(r.integers(len(TLDS)))]}" for j in range(spec.shared_plds)]
        self.class_w = zipf_weights(spec.plds_per_class, spec.skew)
        self.shared_w = zipf_weights(max(1, spec.shared_plds), spec.skew)

    def pick_pld(self, cls: str) -> str:
        spec = self.spec
        if self.shared_pool and self.rng.random() >= spec.signal(cls) * spec.pld_affinity:
            return self.shared_pool[int(self.rng.choice(len(self.shared_pool), p=self.shared_w))]
        return self.class_pools[cls][int(self.rng.choice(spec.plds_per_class, p=self.class_w))]

    def page_for(self, pld: str, cls: str) -> tuple:
        """(url, is_new_page)"""
        spec = self.spec
        # listing pages are class-pure only as often as the signal allows
        key = (pld, cls if self.rng.random() < spec.signal(cls) else None)
        if self.rng.random() < spec.listing_rate:
            url, used = self.listing.get(key, (None, spec.listing_size))
            if used < spec.listing_size:
                self.listing[key] = (url, used + 1)
                return url, False
            url = self.new_url(pld, "list")
            self.listing[key] = (url, 1)
            return url, True
        return self.new_url(pld, "item"), True

    def new_url(self, pld: str, kind: str) -> str:
        n = self.page_count.get(pld, 0)
        self.page_count[pld] = n + 1
        return f"http://www.{pld}/{kind}/{n}.html"

    def predicate(self, prop: str, type_name: str) -> str:
        spec = self.spec
        if self.rng.random() < spec.composite_rate:
            iri = f"{SCHEMA}{type_name}/{prop}"
        else:
            iri = SCHEMA + prop
        if spec.noise_rate and self.noise_rng.random() < spec.noise_rate:
            iri = self.corrupt(iri)
        return iri

    def corrupt(self, iri: str) -> str:
        kind = int(self.noise_rng.integers(4))
        rest = iri[len(SCHEMA):]
        if kind == 0:
            return "https://schema.org/" + rest
        if kind == 1:
            return "http://www.schema.org/" + rest
        if kind == 2:
            return "http://schema.org" + rest
        return SCHEMA + rest.lower()

    def literal(self, prop: str, cls: str) -> Term:
        if prop in ("url", "image", "thumbnailUrl", "contentUrl", "sameAs", "trailer"):
            return Term.iri(f"http://media.example.org/{_slug(cls)}/{self.bnode}")
        return Term.literal(f"{prop} {self.bnode}", lang="en" if prop == NAME[len(SCHEMA):] else None)

    def emit_node(self, url: str, types: Sequence[str], cls_for_keys: Optional[str], site: _Site,
                  extra: Sequence[tuple] = ()) -> str:
        spec = self.spec
        subject = f"_:node{self.bnode:08x}"
        self.bnode += 1
        for t in types:
            self.quads.append(Quad(subject, RDF_TYPE, Term.iri(SCHEMA + t), url))
        type_name = types[0]
        props = [p for p, prob in COMMON_KEYS[spec.task] if self.rng.random() < prob]
        props.extend(site.template)
        if cls_for_keys is not None and self.rng.random() < spec.signal(cls_for_keys):
            props.append(self.dialect(site, cls_for_keys))
        for p in props:
            self.quads.append(Quad(subject, self.predicate(p, type_name), self.literal(p, type_name), url))
        if spec.undefined_rate and self.noise_rng.random() < spec.undefined_rate:
            self.quads.append(Quad(subject, SCHEMA + "notAProperty", Term.literal("?"), url))
        for pred, obj in extra:
            self.quads.append(Quad(subject, pred, obj, url))
        return subject

    def organizer(self, url: str) -> None:
        subject = f"_:org{self.bnode:08x}"
        self.bnode += 1
        self.quads.append(Quad(subject, RDF_TYPE, Term.iri(SCHEMA + "Organization"), url))
        self.quads.append(Quad(subject, SCHEMA + "Organization/name", Term.literal(f"Org {self.bnode}"), url))
        self.quads.append(Quad(subject, SCHEMA + "Organization/url", Term.iri(f"http://org{self.bnode}.example"), url))

    def labeled_event(self, cls: str, type_name: str) -> None:
        pld = self.pick_pld(cls)
        site = self.site(pld)
        url, fresh = self.page_for(pld, type_name)
        if fresh and self.rng.random() < 0.5:
            self.organizer(url)
        subject = self.emit_node(url, [type_name], type_name, site)
        self.gold.append({"subject": subject, "url": url, "label": cls, "labeled": True})

    def movie(self, genres: Sequence[str]) -> None:
        cls = genres[0]
        pld = self.pick_pld(cls)
        site = self.site(pld)
        url, fresh = self.page_for(pld, cls)
        text = "/".join(genres) if self.rng.random() < 0.5 else genres[0]
        extra = [(GENRE if self.rng.random() >= self.spec.composite_rate else SCHEMA + "Movie/genre",
                  Term.literal(text))]
        if len(genres) > 1 and "/" not in text:
            extra.append((GENRE, Term.literal(genres[1])))
        subject = self.emit_node(url, ["Movie"], cls, site, extra)
        for g in genres[1:]:
            if self.rng.random() < self.spec.signal(g):
                p = self.dialect(site, g)
                self.quads.append(Quad(subject, self.predicate(p, "Movie"), self.literal(p, "Movie"), url))
        self.gold.append({"subject": subject, "url": url, "label": "|".join(genres), "labeled": True})

    def run(self) -> tuple:
        spec = self.spec
        self.pools()
        if spec.task == "events":
            jobs = [(c, c) for c in spec.classes for _ in range(spec.nodes_per_class)]
            if spec.other_types:
                per = spec.nodes_per_class // len(spec.other_types)
                extra = spec.nodes_per_class - per * len(spec.other_types)
                for i, t in enumerate(spec.other_types):
                    jobs += [(OTHER, t)] * (per + (1 if i < extra else 0))
            order = self.rng.permutation(len(jobs))
            for i in order:
                cls, t = jobs[i]
                self.labeled_event(cls, t)
            for _ in range(spec.multi_typed):
                a, b = self.rng.choice(len(spec.classes), size=2, replace=False)
                pld = self.pick_pld(spec.classes[a])
                url = self.new_url(pld, "item")
                self.emit_node(url, [spec.classes[a], spec.classes[b]], spec.classes[a], self.site(pld))
            for _ in range(spec.generic_nodes):
                hidden = spec.classes[int(self.rng.integers(len(spec.classes)))]
                pld = self.pick_pld(hidden)
                url = self.new_url(pld, "item")
                subject = self.emit_node(url, ["Event"], hidden, self.site(pld))
                self.gold.append({"subject": subject, "url": url, "label": hidden, "labeled": False})
        else:
            n = len(spec.classes)
            weights = zipf_weights(n, 0.5)
            for _ in range(spec.nodes_per_class * n):
                first = int(self.rng.choice(n, p=weights))
                genres = [spec.classes[first]]
                if self.rng.random() < 0.3:
                    second = int(self.rng.integers(n))
                    if second != first:
                        genres.append(spec.classes[second])
                self.movie(genres)
        return self.quads, self.gold


def generate_synthetic_corpus(spec: SyntheticCorpusSpec) -> tuple:
    """Return ``(quads, gold)``; ``gold`` rows carry subject, url and label."""
    return _Generator(spec).run()


def write_synthetic_corpus(spec: SyntheticCorpusSpec, out: Path) -> tuple:
    """Write ``out`` (N-Quads) and ``out`` + ``.gold.jsonl``; returns both paths."""
    out = Path(out)
    quads, gold = generate_synthetic_corpus(spec)
    write_nquads(quads, out)
    gold_path = out.with_name(out.name + ".gold.jsonl")
    with open(gold_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"spec": spec.to_json()}, sort_keys=True) + "\n")
        for row in gold:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return out, gold_path
