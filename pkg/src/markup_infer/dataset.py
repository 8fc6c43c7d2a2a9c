"""Labeled datasets: labeling, class balancing, sampling and train/test split."""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from ._random import derive_rng
from .ingest.nodes import NodeRecord, pages
from .namespaces import EVENT, GENRE, MOVIE, local_name
from .tasks import EVENTS, OTHER, Task, genre_task
from .vocab import Vocabulary, split_composite

logger = logging.getLogger(__name__)

STRATEGIES = ("stratified", "pld")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledInstance:
    node: NodeRecord
    label: str
    page_context: tuple

    @property
    def node_id(self) -> tuple:
        return self.node.node_id

    @property
    def pld(self) -> str:
        return self.node.pld


@dataclass(frozen=True)
class SamplingConfig:
    strategy: str = "stratified"
    class_cap: Optional[int] = None
    seed: int = 0
    split_ratio: float = 0.8

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if not 0 < self.split_ratio < 1:
            raise ValueError("split_ratio must lie strictly between 0 and 1")
        if self.class_cap is not None and self.class_cap < 1:
            raise ValueError("class_cap must be >= 1")


@dataclass
class LabeledDataset:
    """Instances grouped by class, before sampling."""

    task: Task
    classes: list
    by_class: dict
    cap: int
    stats: dict = field(default_factory=dict)

    def sizes(self) -> dict:
        return {c: len(self.by_class[c]) for c in self.classes}

    def sample(self, strategy: str, seed: int) -> dict:
        return sample(self.by_class, self.cap, seed, strategy)


@dataclass
class DatasetSplit:
    train: list
    test: list
    provenance: dict = field(default_factory=dict)

    @property
    def classes(self) -> list:
        return list(self.provenance.get("classes") or sorted({i.label for i in self.train}))


# --------------------------------------------------------------------------
# labeling


def event_subtypes(node: NodeRecord, vocab: Vocabulary) -> set:
    """Most specific proper event subtypes among the node's rdf:type values."""
    found = {t for t in node.types if vocab.is_type(t) and t != EVENT and vocab.is_subtype(t, EVENT)}
    return {t for t in found if not any(o != t and vocab.is_subtype(o, t) for o in found)}


def is_event(node: NodeRecord, vocab: Vocabulary) -> bool:
    return any(vocab.is_type(t) and vocab.is_subtype(t, EVENT) for t in node.types)


def top_event_classes(nodes: Iterable[NodeRecord], vocab: Vocabulary, k: int = 7) -> list:
    """The ``k`` most frequent single event subtypes (local names), ties by name."""
    counts: Counter = Counter()
    for n in nodes:
        subs = event_subtypes(n, vocab)
        if len(subs) == 1:
            counts[local_name(next(iter(subs)))] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [name for name, _ in ranked[:k]]


def label_event_node(node: NodeRecord, vocab: Vocabulary, head_classes: Sequence[str]) -> Optional[str]:
    """Class label of an event node, or None.

    Nodes typed only ``s:Event`` are the prediction population and get no
    label; so do nodes carrying two or more unrelated subtypes.
    """
    subs = event_subtypes(node, vocab)
    if len(subs) != 1:
        return None
    name = local_name(next(iter(subs)))
    return name if name in head_classes else OTHER


def load_genres(path: Union[str, Path, None] = None) -> dict:
    """Genre name -> list of surface variants (the bundled IMDB list by default)."""
    if path is None:
        text = resources.files("markup_infer.data").joinpath("imdb_genres.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    data = json.loads(text)
    return {g["name"]: list(g.get("variants") or [g["name"]]) for g in data["genres"]}


def property_part(predicate: str) -> str:
    parts = split_composite(predicate)
    return parts[1] if parts else predicate


def genre_literals(node: NodeRecord) -> list:
    return [o.value for p, o in node.statements if o.kind == "literal" and property_part(p) == GENRE]


def label_movie_node(node: NodeRecord, genres: Union[Mapping, Sequence, None] = None) -> set:
    """Genres whose name occurs (case-insensitively) in any s:genre literal."""
    if genres is None:
        genres = load_genres()
    if not isinstance(genres, Mapping):
        genres = {g: [g] for g in genres}
    found = set()
    for text in genre_literals(node):
        low = text.lower()
        for name, variants in genres.items():
            if any(v.lower() in low for v in variants):
                found.add(name)
    return found


def is_movie(node: NodeRecord, vocab: Vocabulary) -> bool:
    return any(vocab.is_type(t) and vocab.is_subtype(t, MOVIE) for t in node.types)


# --------------------------------------------------------------------------
# dataset assembly


def _context_index(nodes: Sequence[NodeRecord]) -> dict:
    return {url: tuple(ns) for url, ns in pages(nodes).items()}


def _check_cap(by_class: Mapping, cap: Optional[int]) -> int:
    smallest = min(by_class, key=lambda c: (len(by_class[c]), c))
    if cap is None:
        cap = len(by_class[smallest])
    if cap < 1:
        raise DatasetError(f"class {smallest!r} is empty")
    for c, items in by_class.items():
        if len(items) < cap:
            raise DatasetError(f"class {c!r} has {len(items)} instances, fewer than cap {cap}")
    return cap


def build_event_dataset(nodes: Sequence[NodeRecord], vocab: Vocabulary, k: int = 7,
                        cap: Optional[int] = None, head_classes: Optional[Sequence[str]] = None
                        ) -> LabeledDataset:
    """Event-subtype dataset with the ``k`` head classes plus ``Other``.

    ``cap`` defaults to the size of the smallest class; an explicit cap larger
    than some class is an error naming that class.
    """
    nodes = list(nodes)
    if head_classes is None:
        head_classes = top_event_classes(nodes, vocab, k)
    context = _context_index(nodes)
    classes = list(head_classes) + [OTHER]
    by_class: dict = {c: [] for c in classes}
    multi = unlabeled = 0
    for n in nodes:
        if not is_event(n, vocab):
            continue
        subs = event_subtypes(n, vocab)
        if len(subs) > 1:
            multi += 1
            continue
        label = label_event_node(n, vocab, head_classes)
        if label is None:
            unlabeled += 1
            continue
        by_class[label].append(LabeledInstance(n, label, context[n.url]))
    if multi:
        logger.info("skipped %d event nodes with several subtypes", multi)
    cap = _check_cap(by_class, cap)
    for c in classes:
        by_class[c].sort(key=lambda i: i.node_id)
    return LabeledDataset(EVENTS, classes, by_class, cap,
                          {"multi_typed": multi, "unlabeled": unlabeled})


def top_genres(nodes: Iterable[NodeRecord], vocab: Vocabulary, genres: Mapping, k: int = 7) -> list:
    counts: Counter = Counter()
    for n in nodes:
        if is_movie(n, vocab):
            counts.update(label_movie_node(n, genres))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [g for g, _ in ranked[:k]]


def build_genre_datasets(nodes: Sequence[NodeRecord], vocab: Vocabulary,
                         genres: Optional[Sequence[str]] = None, genre_list: Optional[Mapping] = None,
                         k: int = 7, cap: Optional[int] = None) -> dict:
    """One binary dataset per genre: instances with that genre vs. all others.

    Only movie nodes with at least one recognised genre take part.  Every
    dataset is capped at the smallest class size over all of them.
    """
    nodes = list(nodes)
    if genre_list is None:
        genre_list = load_genres()
    if genres is None:
        genres = top_genres(nodes, vocab, genre_list, k)
    context = _context_index(nodes)
    labeled = []
    for n in nodes:
        if is_movie(n, vocab):
            found = label_movie_node(n, genre_list)
            if found:
                labeled.append((n, found))
    out = {}
    for g in genres:
        pos = [LabeledInstance(n, g, context[n.url]) for n, found in labeled if g in found]
        neg = [LabeledInstance(n, OTHER, context[n.url]) for n, found in labeled if g not in found]
        if not pos:
            raise DatasetError(f"genre {g!r} has no positive instances")
        pos.sort(key=lambda i: i.node_id)
        neg.sort(key=lambda i: i.node_id)
        out[g] = LabeledDataset(genre_task(g), [g, OTHER], {g: pos, OTHER: neg}, 0)
    shared = min(min(len(ds.by_class[c]) for c in ds.classes) for ds in out.values())
    if cap is None:
        cap = shared
    for ds in out.values():
        ds.cap = _check_cap(ds.by_class, cap)
    return out


# --------------------------------------------------------------------------
# sampling


def _require(by_class: Mapping, cap: int) -> None:
    for c, items in by_class.items():
        if len(items) < cap:
            raise DatasetError(f"class {c!r} has {len(items)} instances, fewer than cap {cap}")


def sample_stratified(by_class: Mapping, cap: int, seed: int) -> dict:
    """``cap`` instances per class, uniformly without replacement."""
    _require(by_class, cap)
    out = {}
    for c, items in by_class.items():
        items = sorted(items, key=lambda i: i.node_id)
        rng = derive_rng(seed, "stratified", c)
        idx = sorted(rng.choice(len(items), size=cap, replace=False).tolist())
        out[c] = [items[i] for i in idx]
    return out


def fair_share_counts(pld_sizes: Mapping[str, int], cap: int) -> dict:
    """How many instances each pld contributes under fair-share sampling.

    Repeatedly take every pld holding fewer instances than the current fair
    share (missing instances / remaining plds).  Once no pld is below the
    share, each remaining pld gives ``floor(share)`` and the leftover
    deficit goes one instance per pld, largest plds first (ties by name).
    """
    if sum(pld_sizes.values()) < cap:
        raise DatasetError(f"only {sum(pld_sizes.values())} instances for cap {cap}")
    counts = dict.fromkeys(pld_sizes, 0)
    active = set(pld_sizes)
    remaining = cap
    while remaining > 0 and active:
        share = remaining / len(active)
        small = [p for p in active if pld_sizes[p] < share]
        if small:
            for p in small:
                counts[p] = pld_sizes[p]
                remaining -= pld_sizes[p]
            active.difference_update(small)
            continue
        base = math.floor(share)
        for p in active:
            counts[p] = base
        remaining -= base * len(active)
        for p in sorted(active, key=lambda p: (-pld_sizes[p], p))[:remaining]:
            counts[p] += 1
        remaining = 0
    return counts


def sample_pld_aware(by_class: Mapping, cap: int, seed: int) -> dict:
    """``cap`` instances per class spread over plds by fair share."""
    _require(by_class, cap)
    out = {}
    for c, items in by_class.items():
        groups: dict = {}
        for inst in sorted(items, key=lambda i: i.node_id):
            groups.setdefault(inst.pld, []).append(inst)
        counts = fair_share_counts({p: len(v) for p, v in groups.items()}, cap)
        rng = derive_rng(seed, "pld", c)
        chosen = []
        for p in sorted(groups):
            members, n = groups[p], counts[p]
            if n == len(members):
                chosen.extend(members)
            elif n:
                idx = sorted(rng.choice(len(members), size=n, replace=False).tolist())
                chosen.extend(members[i] for i in idx)
        out[c] = sorted(chosen, key=lambda i: i.node_id)
    return out


def sample(by_class: Mapping, cap: int, seed: int, strategy: str = "stratified") -> dict:
    if strategy == "stratified":
        return sample_stratified(by_class, cap, seed)
    if strategy in ("pld", "pld-aware"):
        return sample_pld_aware(by_class, cap, seed)
    raise ValueError(f"unknown sampling strategy {strategy!r}")


def split_train_test(by_class: Mapping, ratio: float = 0.8, seed: int = 0,
                     provenance: Optional[dict] = None) -> DatasetSplit:
    """Per-class split with ``floor(n * ratio)`` instances going to training."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie strictly between 0 and 1")
    train, test = [], []
    for c, items in by_class.items():
        if len(items) < 2:
            raise DatasetError(f"class {c!r} has fewer than 2 instances")
        items = sorted(items, key=lambda i: i.node_id)
        order = derive_rng(seed, "split", c).permutation(len(items))
        n_train = math.floor(len(items) * ratio + 1e-9)
        train.extend(items[i] for i in order[:n_train])
        test.extend(items[i] for i in order[n_train:])
    prov = {"classes": list(by_class), "ratio": ratio, "seed": seed}
    prov.update(provenance or {})
    return DatasetSplit(train, test, prov)


def distinct_plds(instances: Iterable[LabeledInstance]) -> int:
    return len({i.pld for i in instances})


# --------------------------------------------------------------------------
# files


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + ".pages.jsonl")


def write_split(split: DatasetSplit, path: Union[str, Path]) -> Path:
    """Write a split as JSONL plus a page-index sidecar; returns the sidecar path."""
    path = Path(path)
    pages_seen: dict = {}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"provenance": split.provenance}, sort_keys=True) + "\n")
        for part, items in (("train", split.train), ("test", split.test)):
            for inst in items:
                pages_seen.setdefault(inst.node.url, inst.page_context)
                row = {"split": part, "label": inst.label, "page": inst.node.url,
                       "node": inst.node.to_json()}
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    side = _sidecar(path)
    with open(side, "w", encoding="utf-8") as fh:
        for url in sorted(pages_seen):
            row = {"url": url, "nodes": [n.to_json() for n in pages_seen[url]]}
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    return side


def read_split(path: Union[str, Path]) -> DatasetSplit:
    path = Path(path)
    context = {}
    with open(_sidecar(path), encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            context[row["url"]] = tuple(NodeRecord.from_json(n) for n in row["nodes"])
    split = DatasetSplit([], [])
    with open(path, encoding="utf-8") as fh:
        split.provenance = json.loads(fh.readline())["provenance"]
        for line in fh:
            row = json.loads(line)
            node = NodeRecord.from_json(row["node"])
            inst = LabeledInstance(node, row["label"], context.get(row["page"], (node,)))
            (split.train if row["split"] == "train" else split.test).append(inst)
    return split
