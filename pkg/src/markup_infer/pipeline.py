"""Batch pipeline: profile, cleanse, build datasets, sample, train, evaluate.

Every artifact written by a run names the content hashes of its inputs.
The only wall-clock value lives in ``run.json``; all other files are a pure
function of (corpus, config, seed).
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .baselines import RandomClassifier, SDTypeClassifier
from .baselines.kgb import LinkingClientConfig, LinkingError, SpotlightClient, kgb_batch, resolve_kgb
from .cleansing import Policy, cleanse_quads
from .dataset import (DatasetError, build_event_dataset, build_genre_datasets, sample,
                      split_train_test, write_split)
from .evaluation import ClassScores, EvaluationReport, dumps_report, evaluate, macro_table, paired_ttest
from .features import MarkupVectorizer, Standardizer
from .ingest.domains import suffix_list_version
from .ingest.nodes import assemble_nodes, profile_corpus, write_nodes_jsonl
from .ingest.nquads import ErrorPolicy, read_nquads, write_nquads
from .learn import SPACES, make_classifier, random_search
from .model import MarkupClassifier, save_model
from .tasks import parse_task
from .vocab import load_vocabulary

logger = logging.getLogger(__name__)

STAGES = ("profile", "cleanse", "build-dataset", "sample", "search", "train", "evaluate")


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` says why."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def sha256_file(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class PipelineConfig:
    input: str = ""
    output_dir: str = "run"
    task: str = "events"
    k: int = 7
    policy: str = "drop"
    parse_errors: str = "skip"
    strategy: str = "pld"
    cap: Union[str, int] = "auto"
    ratio: float = 0.8
    seed: int = 0
    algorithm: str = "rforest"
    params: dict = field(default_factory=dict)
    search_trials: int = 0
    baselines: list = field(default_factory=lambda: ["random", "sdtype"])
    kgb_fixtures: Optional[str] = None
    kgb_endpoint: Optional[str] = None
    vocabulary: Optional[str] = None
    jobs: int = 1

    @classmethod
    def from_dict(cls, data: Mapping) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**dict(data))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping] = None) -> "PipelineConfig":
        """Read a JSON config and apply ``overrides`` (flags win; None means unset)."""
        data: dict = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    data = json.load(fh)
            except FileNotFoundError:
                raise FileNotFoundError(f"config file not found: {path}") from None
            except json.JSONDecodeError as exc:
                raise ValueError(f"invalid JSON in config {path}: {exc}") from None
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)

    def validate(self) -> None:
        if not self.input:
            raise ValueError("config needs an 'input' corpus path")
        parse_task(self.task)
        Policy(self.policy)
        ErrorPolicy(self.parse_errors)
        if self.strategy not in ("stratified", "pld"):
            raise ValueError("strategy must be 'stratified' or 'pld'")
        if self.cap != "auto" and (not isinstance(self.cap, int) or self.cap < 1):
            raise ValueError("cap must be 'auto' or a positive integer")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie strictly between 0 and 1")
        make_classifier(self.algorithm, **self.params)
        for b in self.baselines:
            if b not in ("random", "sdtype", "kgb"):
                raise ValueError(f"unknown baseline {b!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def to_json(self) -> dict:
        return asdict(self)

    def fingerprint(self) -> str:
        """Hash of everything that affects results (output location excluded)."""
        d = self.to_json()
        d.pop("output_dir")
        d.pop("jobs")
        return sha256_text(json.dumps(d, sort_keys=True))

    def plan(self) -> list:
        steps = [
            f"profile      {self.input}",
            f"cleanse      policy={self.policy} parse_errors={self.parse_errors}",
            f"build-dataset task={self.task} k={self.k} cap={self.cap}",
            f"sample       strategy={self.strategy} seed={self.seed} ratio={self.ratio}",
        ]
        if self.search_trials:
            steps.append(f"search       algorithm={self.algorithm} trials={self.search_trials}")
        steps.append(f"train        algorithm={self.algorithm} params={json.dumps(self.params, sort_keys=True)}")
        steps.append(f"evaluate     systems={[self.algorithm] + list(self.baselines)}")
        steps.append(f"output       {self.output_dir}")
        return steps


def _write_json(path: Path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_datasets(nodes, vocab, task: str, k: int = 7, cap: Optional[int] = None) -> dict:
    """Map dataset name to ``LabeledDataset`` for ``events``, ``genre:<g>`` or ``movies``."""
    t = parse_task(task)
    if t.name == "events":
        return {"events": build_event_dataset(nodes, vocab, k=k, cap=cap)}
    genres = [t.genre] if t.genre else None
    built = build_genre_datasets(nodes, vocab, genres=genres, k=k, cap=cap)
    return {f"genre:{g}": ds for g, ds in built.items()}


def fit_model(train, task: str, algorithm: str, params: Mapping, seed: int, search_trials: int = 0,
              vocabulary: Optional[str] = None) -> tuple:
    """Train a ``MarkupClassifier``; returns ``(model, search_result or None)``."""
    params = dict(params)
    if "random_state" in make_classifier(algorithm).get_params():
        params.setdefault("random_state", seed)
    result = None
    if search_trials and algorithm in SPACES:
        vec = MarkupVectorizer(task, vocabulary).fit(train)
        X = Standardizer().fit_transform(vec.transform(train))
        y = np.asarray([i.label for i in train])
        result = random_search(make_classifier(algorithm, **params), SPACES[algorithm], X, y,
                               n_trials=search_trials, seed=seed)
        params.update(result.best_params)
    model = MarkupClassifier(make_classifier(algorithm, **params), task, vocabulary).fit(train)
    return model, result


def baseline_predictions(name: str, train, test, task: str, seed: int, config: PipelineConfig) -> tuple:
    """Predictions of a baseline system; returns ``(labels, extra report fields)``."""
    if name == "random":
        return list(RandomClassifier(random_state=seed).fit(train).predict(test)), {}
    if name == "sdtype":
        return list(SDTypeClassifier(task, config.vocabulary).fit(train).predict(test)), {}
    if name == "kgb":
        kw = {"fixtures": config.kgb_fixtures}
        if config.kgb_endpoint:
            kw["endpoint"] = config.kgb_endpoint
        client = SpotlightClient(LinkingClientConfig(**kw))
        preds, skipped = kgb_batch([i.node for i in test], client, parse_task(task), jobs=config.jobs)
        looked_up = [p for p in preds if p is None or p.flag != "no-name"]
        if looked_up and skipped == len(looked_up):
            raise LinkingError(f"all {skipped} entity-linking lookups failed")
        gold = [i.label for i in test]
        strict = resolve_kgb(preds, gold, "strict")
        return resolve_kgb(preds, gold, "generous"), {"skipped": skipped, "strict_predictions": strict}
    raise ValueError(f"unknown baseline {name!r}")


def run_pipeline(config: PipelineConfig, dry_run: bool = False,
                 echo: Callable[[str], None] = print) -> dict:
    """Run all stages; returns ``{"reports": {...}, "artifacts": [...]}``.

    With ``dry_run`` the plan is printed and nothing is read or written.
    Any stage failure is re-raised as ``StageError``.
    """
    if dry_run:
        for line in config.plan():
            echo(line)
        return {"reports": {}, "artifacts": []}

    started = time.time()
    out = Path(config.output_dir)
    artifacts: list = []
    stage = "profile"

    def keep(path: Path) -> Path:
        artifacts.append(str(path))
        return path

    try:
        out.mkdir(parents=True, exist_ok=True)
        src = Path(config.input)
        if not src.is_file():
            raise FileNotFoundError(f"input corpus not found: {src}")
        vocab = load_vocabulary(config.vocabulary)
        base_prov = {
            "config_sha256": config.fingerprint(),
            "input": {"name": src.name, "sha256": sha256_file(src)},
            "vocabulary_version": vocab.version,
            "public_suffix_version": suffix_list_version(),
            "seed": config.seed,
        }
        quads, parse_report = read_nquads(src, ErrorPolicy(config.parse_errors))
        raw_nodes = assemble_nodes(quads)
        profile = {"parse": parse_report.to_dict(),
                   "corpus": profile_corpus(raw_nodes).to_json(),
                   "provenance": base_prov}
        _write_json(keep(out / "profile.json"), profile)

        stage = "cleanse"
        clean, creport = cleanse_quads(quads, vocab, Policy(config.policy))
        clean_path = keep(out / "cleansed.nq")
        write_nquads(clean, clean_path)
        clean_prov = dict(base_prov, cleansed_sha256=sha256_file(clean_path))
        _write_json(keep(out / "cleansing.json"), {"report": creport.to_json(), "provenance": base_prov})

        stage = "build-dataset"
        nodes = assemble_nodes(clean)
        write_nodes_jsonl(nodes, keep(out / "nodes.jsonl"))
        cap = None if config.cap == "auto" else int(config.cap)
        datasets = build_datasets(nodes, vocab, config.task, config.k, cap)
        if not datasets:
            raise DatasetError(f"no datasets for task {config.task!r}")

        reports: dict = {}
        systems: dict = {}
        for name, ds in datasets.items():
            stage = "sample"
            sampled = sample(ds.by_class, ds.cap, config.seed, config.strategy)
            split = split_train_test(sampled, config.ratio, config.seed,
                                     dict(clean_prov, dataset=name, strategy=config.strategy, cap=ds.cap))
            split.provenance["classes"] = list(ds.classes)
            slug = name.replace(":", "-")
            split_path = keep(out / f"{slug}.split.jsonl")
            keep(write_split(split, split_path))
            split_prov = dict(clean_prov, dataset=name, split_sha256=sha256_file(split_path))

            stage = "search" if config.search_trials else "train"
            model, search = fit_model(split.train, ds.task.name, config.algorithm, config.params,
                                      config.seed, config.search_trials, config.vocabulary)
            if search is not None:
                _write_json(keep(out / f"{slug}.search.json"), dict(search.to_json(), provenance=split_prov))
            stage = "train"
            model.provenance_.update(split_prov)
            model_path = keep(out / f"{slug}.model.json")
            save_model(model, model_path)

            stage = "evaluate"
            gold = [i.label for i in split.test]
            runs = {config.algorithm: (list(model.predict(split.test)), {"model_sha256": sha256_file(model_path)})}
            for b in config.baselines:
                runs[b] = baseline_predictions(b, split.train, split.test, ds.task.name, config.seed, config)
            for system, (preds, extra) in runs.items():
                prov = dict(split_prov, system=system)
                strict = extra.pop("strict_predictions", None)
                prov.update(extra)
                report = evaluate(preds, gold, ds.classes, prov)
                if strict is not None:
                    report.provenance["strict_macro"] = evaluate(strict, gold, ds.classes).macro
                path = keep(out / f"{slug}.{system}.report.json")
                path.write_text(dumps_report(report) + "\n", encoding="utf-8")
                (out / f"{slug}.{system}.report.txt").write_text(report.to_text() + "\n", encoding="utf-8")
                reports[(name, system)] = report
                systems.setdefault(system, {})[name] = report
        table = keep(out / "summary.txt")
        table.write_text(macro_table(systems) + "\n", encoding="utf-8")
        _write_json(keep(out / "significance.json"), significance(systems, config.algorithm))
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc

    # the single non-deterministic file
    _write_json(out / "run.json", {"timestamp": started, "config": config.to_json(), "artifacts": artifacts})
    return {"reports": reports, "artifacts": artifacts}


def paired_scores(a: Mapping[str, EvaluationReport], b: Mapping[str, EvaluationReport]) -> tuple:
    """Pairing units for a t-test between two systems.

    With one multi-class dataset the units are its per-class F1 values;
    with several (binary genre) datasets they are the per-dataset macro F1.
    """
    names = [n for n in a if n in b]
    if len(names) == 1:
        ra, rb = a[names[0]], b[names[0]]
        return [ra.per_class[c].f1 for c in ra.classes], [rb.per_class[c].f1 for c in ra.classes]
    return [a[n].macro_f1 for n in names], [b[n].macro_f1 for n in names]


def significance(systems: Mapping[str, Mapping[str, EvaluationReport]], main: str) -> dict:
    out = {}
    for other in systems:
        if other == main:
            continue
        xa, xb = paired_scores(systems[main], systems[other])
        if len(xa) < 2:
            continue
        r = paired_ttest(xa, xb)
        out[f"{main} vs {other}"] = {"t": r.t if math.isfinite(r.t) else str(r.t), "p": r.p, "df": r.df,
                                     "degenerate": r.degenerate, "n": len(xa)}
    return out


def report_from_file(path: Union[str, Path]) -> EvaluationReport:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    per_class = {c: ClassScores(**s) for c, s in data["per_class"].items()}
    return EvaluationReport(data["classes"], per_class, data["macro"], data["confusion"], data["provenance"])
