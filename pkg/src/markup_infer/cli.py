"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 external-service error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .baselines.kgb import LinkingError
from .cleansing import Policy, cleanse_quads
from .dataset import (DatasetError, event_subtypes, genre_literals, is_event, is_movie, read_split, sample,
                      split_train_test, write_split)
from .evaluation import dumps_report, evaluate
from .ingest.nodes import assemble_nodes, profile_corpus
from .ingest.nquads import ErrorPolicy, NQuadsSyntaxError, Quad, Term, read_nquads, write_nquads
from .learn import SPACES
from .model import ModelFormatError, as_instances, load_model, save_model
from .namespaces import GENRE, RDF_TYPE, SCHEMA
from .pipeline import (PipelineConfig, StageError, baseline_predictions, build_datasets, fit_model,
                       run_pipeline, sha256_file)
from .synthetic import SyntheticCorpusSpec, write_synthetic_corpus
from .tasks import OTHER, parse_task
from .vocab import VocabularyError, load_vocabulary

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SERVICE = 0, 1, 2, 3
ENDPOINT_ENV = "MARKUP_INFER_SPOTLIGHT_ENDPOINT"

DATA_ERRORS = (DatasetError, NQuadsSyntaxError, ModelFormatError, VocabularyError, OSError, ValueError, KeyError)

log = logging.getLogger("markup_infer")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cap(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("cap must be 'auto' or a positive integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("cap must be 'auto' or a positive integer")
    return value


def _json_out(data, path: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_quads(path: str, strict: bool = False):
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return read_nquads(path, ErrorPolicy.ABORT if strict else ErrorPolicy.SKIP)


def _split_outputs(out: str, names: Sequence[str]) -> dict:
    if len(names) == 1:
        return {names[0]: Path(out)}
    p = Path(out)
    return {n: p.with_name(f"{p.stem}.{n.replace(':', '-')}{p.suffix}") for n in names}


# --------------------------------------------------------------------------
# subcommands


def cmd_profile(args) -> int:
    quads, report = _load_quads(args.input, args.strict)
    nodes = assemble_nodes(quads)
    vocab = load_vocabulary(args.vocabulary)
    type_iri = None
    if args.type:
        type_iri = args.type if "://" in args.type else SCHEMA + args.type
    stats = profile_corpus(nodes, type_iri, vocab)
    _json_out({"input_sha256": sha256_file(args.input), "parse": report.to_dict(), "corpus": stats.to_json()},
              args.out)
    return EXIT_OK


def cmd_cleanse(args) -> int:
    quads, parse_report = _load_quads(args.input, args.strict)
    clean, report = cleanse_quads(quads, load_vocabulary(args.vocabulary), Policy(args.policy))
    write_nquads(clean, args.out)
    data = {"input_sha256": sha256_file(args.input), "output_sha256": sha256_file(args.out),
            "parse": parse_report.to_dict(), "cleansing": report.to_json()}
    _json_out(data, args.report)
    return EXIT_OK


def cmd_build_dataset(args) -> int:
    quads, _ = _load_quads(args.input, args.strict)
    vocab = load_vocabulary(args.vocabulary)
    nodes = assemble_nodes(quads)
    cap = None if args.cap == "auto" else args.cap
    datasets = build_datasets(nodes, vocab, args.task, args.k, cap)
    outputs = _split_outputs(args.out, list(datasets))
    summary = {}
    for name, ds in datasets.items():
        sampled = sample(ds.by_class, ds.cap, args.seed, args.strategy)
        prov = {"input_sha256": sha256_file(args.input), "dataset": name, "strategy": args.strategy,
                "cap": ds.cap, "task": ds.task.name, "vocabulary_version": vocab.version}
        split = split_train_test(sampled, args.ratio, args.seed, prov)
        split.provenance["classes"] = list(ds.classes)
        write_split(split, outputs[name])
        summary[name] = {"path": str(outputs[name]), "cap": ds.cap, "class_sizes": ds.sizes(),
                         "train": len(split.train), "test": len(split.test)}
    _json_out(summary, None)
    return EXIT_OK


def cmd_sample(args) -> int:
    src = read_split(args.split)
    pool: dict = {}
    for inst in src.train + src.test:
        pool.setdefault(inst.label, []).append(inst)
    classes = src.classes
    cap = min(len(pool.get(c, [])) for c in classes) if args.cap == "auto" else args.cap
    sampled = sample({c: pool.get(c, []) for c in classes}, cap, args.seed, args.strategy)
    prov = dict(src.provenance, source_split_sha256=sha256_file(args.split), strategy=args.strategy,
                cap=cap, seed=args.seed)
    split = split_train_test(sampled, args.ratio, args.seed, prov)
    split.provenance["classes"] = list(classes)
    write_split(split, args.out)
    _json_out({"path": args.out, "cap": cap, "train": len(split.train), "test": len(split.test)}, None)
    return EXIT_OK


def _task_of(split) -> str:
    return split.provenance.get("task") or ("events" if split.provenance.get("dataset", "events") == "events"
                                            else split.provenance["dataset"])


def cmd_search(args) -> int:
    if args.algorithm not in SPACES:
        raise ValueError(f"no search space for {args.algorithm!r}; choose from {sorted(SPACES)}")
    split = read_split(args.split)
    _, result = fit_model(split.train, _task_of(split), args.algorithm, {}, args.seed, args.trials,
                          args.vocabulary)
    data = dict(result.to_json(), algorithm=args.algorithm, split_sha256=sha256_file(args.split))
    _json_out(data, args.out)
    return EXIT_OK


def _params(args) -> dict:
    params = {}
    if args.params_file:
        data = json.loads(Path(args.params_file).read_text(encoding="utf-8"))
        params.update(data.get("best_params", data))
    if args.params:
        params.update(json.loads(args.params))
    return params


def cmd_train(args) -> int:
    split = read_split(args.split)
    model, _ = fit_model(split.train, _task_of(split), args.algorithm, _params(args), args.seed,
                         args.search_trials, args.vocabulary)
    model.provenance_.update({"split_sha256": sha256_file(args.split), "seed": args.seed})
    save_model(model, args.out)
    _json_out({"model": args.out, "classes": [str(c) for c in model.classes_],
               "features": model.feature_space.dimension}, None)
    return EXIT_OK


def _write_report(report, args) -> None:
    if args.out:
        Path(args.out).write_text(dumps_report(report) + "\n", encoding="utf-8")
    print(report.to_text())


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    split = read_split(args.split)
    gold = [i.label for i in split.test]
    preds = list(model.predict(split.test))
    prov = {"model_sha256": sha256_file(args.model), "split_sha256": sha256_file(args.split)}
    _write_report(evaluate(preds, gold, split.classes, prov), args)
    return EXIT_OK


def inferred_quads(model, nodes, every_node: bool = False) -> list:
    """Statements implied by the model's predictions; ``Other`` yields nothing.

    By default only nodes lacking the target statement are classified:
    events typed plain ``s:Event`` and movies without a genre.
    """
    vocab = load_vocabulary()
    task = parse_task(model.task)
    if task.is_genre:
        targets = [n for n in nodes if is_movie(n, vocab) and (every_node or not genre_literals(n))]
    else:
        targets = [n for n in nodes if is_event(n, vocab) and (every_node or not event_subtypes(n, vocab))]
    if not targets:
        return []
    preds = model.predict(as_instances(targets, nodes))
    out = []
    for node, label in zip(targets, preds):
        label = str(label)
        if label == OTHER:
            continue
        if task.is_genre:
            out.append(Quad(node.subject, GENRE, Term.literal(label), node.url))
        else:
            out.append(Quad(node.subject, RDF_TYPE, Term.iri(SCHEMA + label), node.url))
    return out


def cmd_predict(args) -> int:
    model = load_model(args.model)
    quads, _ = _load_quads(args.input, args.strict)
    # keep undefined terms so that no node silently disappears
    quads, _ = cleanse_quads(quads, load_vocabulary(args.vocabulary), Policy.KEEP)
    inferred = inferred_quads(model, assemble_nodes(quads), args.all)
    if args.out:
        write_nquads(inferred, args.out)
    else:
        for q in inferred:
            sys.stdout.write(q.to_nquads() + "\n")
    log.info("inferred %d statements", len(inferred))
    return EXIT_OK


def cmd_baseline(args) -> int:
    split = read_split(args.split)
    endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV)
    cfg = PipelineConfig(input=args.split, baselines=[args.system], kgb_fixtures=args.fixtures,
                         kgb_endpoint=endpoint, jobs=args.jobs, vocabulary=args.vocabulary)
    preds, extra = baseline_predictions(args.system, split.train, split.test, _task_of(split), args.seed, cfg)
    gold = [i.label for i in split.test]
    strict = extra.pop("strict_predictions", None)
    if strict is not None and args.mode == "strict":
        preds = strict
    prov = dict(extra, system=args.system, split_sha256=sha256_file(args.split), seed=args.seed)
    if strict is not None:
        prov["kgb_mode"] = args.mode
    _write_report(evaluate(preds, gold, split.classes, prov), args)
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    kw = json.loads(Path(args.spec).read_text(encoding="utf-8")) if args.spec else {}
    for key in ("nodes_per_class", "plds_per_class", "skew", "seed", "noise_rate", "generic_nodes"):
        value = getattr(args, key)
        if value is not None:
            kw[key] = value
    if args.signal is not None:
        kw["signal_strength"] = args.signal
    task = kw.pop("task", args.task)
    spec = SyntheticCorpusSpec.for_movies(**kw) if task == "movies" else SyntheticCorpusSpec(**kw)
    out, gold = write_synthetic_corpus(spec, Path(args.out))
    _json_out({"corpus": str(out), "gold": str(gold), "sha256": sha256_file(out)}, None)
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {
        "input": args.input, "output_dir": args.out, "task": args.task, "strategy": args.strategy,
        "cap": args.cap, "seed": args.seed, "algorithm": args.algorithm, "policy": args.policy,
        "search_trials": args.search_trials, "kgb_fixtures": args.fixtures, "jobs": args.jobs,
        "kgb_endpoint": os.environ.get(ENDPOINT_ENV),
    }
    if args.baselines is not None:
        overrides["baselines"] = [b for b in args.baselines.split(",") if b]
    config = PipelineConfig.load(args.config, overrides)
    result = run_pipeline(config, dry_run=args.dry_run)
    if not args.dry_run:
        summary = Path(config.output_dir) / "summary.txt"
        print(summary.read_text(encoding="utf-8"), end="")
        log.info("%d artifacts in %s", len(result["artifacts"]), config.output_dir)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="markup-infer", description="Infer missing schema.org statements in web markup.")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for external lookups")
    p.add_argument("--vocabulary", help="schema.org snapshot JSON (bundled one by default)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def corpus_cmd(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--in", dest="input", required=True, help="N-Quads file (optionally gzipped)")
        s.add_argument("--strict", action="store_true", help="abort on the first malformed line")
        s.set_defaults(fn=fn)
        return s

    s = corpus_cmd("profile", cmd_profile, "corpus statistics")
    s.add_argument("--type", help="restrict to nodes of this type and its subtypes")
    s.add_argument("--out")

    s = corpus_cmd("cleanse", cmd_cleanse, "fix namespaces and casing, handle undefined terms")
    s.add_argument("--out", required=True)
    s.add_argument("--policy", choices=[x.value for x in Policy], default="drop")
    s.add_argument("--report")

    s = corpus_cmd("build-dataset", cmd_build_dataset, "label, sample and split a cleansed corpus")
    s.add_argument("--task", default="events", help="events | genre:<name> | movies")
    s.add_argument("--strategy", choices=["stratified", "pld"], default="stratified")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=_cap, default="auto")
    s.add_argument("--ratio", type=float, default=0.8)
    s.add_argument("--k", type=int, default=7)
    s.add_argument("--out", required=True)

    s = sub.add_parser("sample", help="resample an existing split")
    s.add_argument("--split", required=True)
    s.add_argument("--strategy", choices=["stratified", "pld"], default="stratified")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=_cap, default="auto")
    s.add_argument("--ratio", type=float, default=0.8)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("search", help="random hyperparameter search")
    s.add_argument("--split", required=True)
    s.add_argument("--algorithm", default="rforest")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_search)

    s = sub.add_parser("train", help="train and save a model")
    s.add_argument("--split", required=True)
    s.add_argument("--algorithm", default="rforest")
    s.add_argument("--params", help="JSON object of hyperparameters")
    s.add_argument("--params-file", help="search output or JSON object of hyperparameters")
    s.add_argument("--search-trials", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_train)

    s = sub.add_parser("evaluate", help="score a model on a split's test part")
    s.add_argument("--model", required=True)
    s.add_argument("--split", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_evaluate)

    s = corpus_cmd("predict", cmd_predict, "write inferred statements as N-Quads")
    s.add_argument("--model", required=True)
    s.add_argument("--all", action="store_true", help="classify every event/movie node, not just untyped ones")
    s.add_argument("--out")

    s = sub.add_parser("baseline", help="evaluate a baseline on a split")
    s.add_argument("--split", required=True)
    s.add_argument("--system", choices=["random", "sdtype", "kgb"], required=True)
    s.add_argument("--fixtures", help="offline entity-linking responses (JSON)")
    s.add_argument("--endpoint", help=f"entity-linking URL template (else ${ENDPOINT_ENV})")
    s.add_argument("--mode", choices=["generous", "strict"], default="generous")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_baseline)

    s = sub.add_parser("gen-synthetic", help="write a synthetic corpus and gold labels")
    s.add_argument("--out", required=True)
    s.add_argument("--spec", help="JSON file with generator fields")
    s.add_argument("--task", choices=["events", "movies"], default="events")
    s.add_argument("--nodes-per-class", dest="nodes_per_class", type=int)
    s.add_argument("--plds-per-class", dest="plds_per_class", type=int)
    s.add_argument("--skew", type=float)
    s.add_argument("--signal", type=float)
    s.add_argument("--noise-rate", dest="noise_rate", type=float)
    s.add_argument("--generic-nodes", dest="generic_nodes", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(fn=cmd_gen_synthetic)

    s = sub.add_parser("run", help="run the whole pipeline from a JSON config")
    s.add_argument("--config")
    s.add_argument("--in", dest="input")
    s.add_argument("--out", help="output directory")
    s.add_argument("--task")
    s.add_argument("--strategy", choices=["stratified", "pld"])
    s.add_argument("--cap", type=_cap)
    s.add_argument("--seed", type=int)
    s.add_argument("--algorithm")
    s.add_argument("--policy", choices=[x.value for x in Policy])
    s.add_argument("--search-trials", type=int)
    s.add_argument("--baselines", help="comma-separated: random,sdtype,kgb")
    s.add_argument("--fixtures")
    s.add_argument("--dry-run", action="store_true")
    s.set_defaults(fn=cmd_run)
    return p


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, LinkingError):
        return EXIT_SERVICE
    if isinstance(exc, DATA_ERRORS):
        return EXIT_DATA
    return EXIT_DATA


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "vocabulary", None) is None:
        args.vocabulary = None
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        if isinstance(exc, (StageError, LinkingError) + DATA_ERRORS):
            print(f"error: {exc}", file=sys.stderr)
            return _exit_code(exc)
        raise


if __name__ == "__main__":
    sys.exit(main())
