import json
import subprocess
import sys

import pytest

from markup_infer.cli import ENDPOINT_ENV, main
from markup_infer.ingest.nquads import read_nquads
from markup_infer.namespaces import GENRE, RDF_TYPE
from markup_infer.pipeline import PipelineConfig, StageError, run_pipeline


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    out = d / "corpus.nq"
    assert main(["gen-synthetic", "--out", str(out), "--nodes-per-class", "40", "--seed", "1",
                 "--noise-rate", "0.05"]) == 0
    return out


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_profile_and_cleanse(corpus, tmp_path, capsys):
    assert main(["profile", "--in", str(corpus), "--type", "Event"]) == 0
    prof = _json(capsys)
    assert prof["parse"]["skipped"] == 0 and prof["corpus"]["total_nodes"] > 8 * 40
    clean = tmp_path / "clean.nq"
    assert main(["cleanse", "--in", str(corpus), "--out", str(clean)]) == 0
    rep = _json(capsys)
    assert rep["cleansing"]["namespace_fixes"] > 0 and rep["output_sha256"]
    assert main(["cleanse", "--in", str(clean), "--out", str(tmp_path / "twice.nq")]) == 0
    again = _json(capsys)["cleansing"]
    assert again["namespace_fixes"] == again["casing_fixes"] == 0


def test_stepwise_commands(corpus, tmp_path, capsys):
    split = tmp_path / "events.split.jsonl"
    assert main(["build-dataset", "--in", str(corpus), "--strategy", "pld", "--out", str(split)]) == 0
    info = _json(capsys)["events"]
    assert info["cap"] == 40 and info["train"] == 8 * 32 and info["test"] == 8 * 8

    resampled = tmp_path / "re.split.jsonl"
    assert main(["sample", "--split", str(split), "--cap", "20", "--out", str(resampled)]) == 0
    assert _json(capsys)["train"] == 8 * 16

    search = tmp_path / "search.json"
    assert main(["search", "--split", str(split), "--algorithm", "dtree", "--trials", "3",
                 "--out", str(search)]) == 0
    assert len(json.loads(search.read_text())["trials"]) == 3

    model = tmp_path / "m.json"
    assert main(["train", "--split", str(split), "--algorithm", "dtree", "--params-file", str(search),
                 "--out", str(model)]) == 0
    capsys.readouterr()
    report = tmp_path / "report.json"
    assert main(["evaluate", "--model", str(model), "--split", str(split), "--out", str(report)]) == 0
    assert "macro avg" in capsys.readouterr().out
    data = json.loads(report.read_text())
    assert sum(s["support"] for s in data["per_class"].values()) == 64
    assert data["provenance"]["model_sha256"]

    assert main(["baseline", "--split", str(split), "--system", "sdtype"]) == 0
    assert main(["baseline", "--split", str(split), "--system", "random", "--out",
                 str(tmp_path / "r.json")]) == 0
    capsys.readouterr()


def test_predict_writes_types(corpus, tmp_path, capsys):
    split = tmp_path / "s.jsonl"
    model = tmp_path / "m.json"
    main(["build-dataset", "--in", str(corpus), "--out", str(split)])
    main(["train", "--split", str(split), "--algorithm", "rforest", "--params", '{"n_estimators": 5}',
          "--out", str(model)])
    capsys.readouterr()
    out = tmp_path / "inferred.nq"
    assert main(["predict", "--in", str(corpus), "--model", str(model), "--out", str(out)]) == 0
    quads, _ = read_nquads(out)
    # the corpus has 50 plain s:Event nodes; some are predicted Other and emit nothing
    assert 0 < len(quads) <= 50
    assert all(q.predicate == RDF_TYPE for q in quads)
    assert main(["predict", "--in", str(corpus), "--model", str(model), "--all"]) == 0
    assert capsys.readouterr().out.count("\n") > len(quads)


def test_predict_movies(tmp_path, capsys):
    corpus = tmp_path / "movies.nq"
    main(["gen-synthetic", "--task", "movies", "--out", str(corpus), "--nodes-per-class", "30"])
    split = tmp_path / "m.split.jsonl"
    assert main(["build-dataset", "--in", str(corpus), "--task", "genre:Drama", "--out", str(split)]) == 0
    model = tmp_path / "m.json"
    assert main(["train", "--split", str(split), "--algorithm", "gnb", "--out", str(model)]) == 0
    capsys.readouterr()
    assert main(["predict", "--in", str(corpus), "--model", str(model), "--all"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln]
    assert lines and all(f"<{GENRE}> \"Drama\"" in ln for ln in lines)


def test_exit_codes(tmp_path, capsys):
    assert main(["profile", "--in", str(tmp_path / "missing.nq")]) == 2
    assert "missing.nq" in capsys.readouterr().err
    with pytest.raises(SystemExit) as err:
        main(["train"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["build-dataset", "--in", "x", "--out", "y", "--cap", "0"])
    assert err.value.code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["evaluate", "--model", str(bad), "--split", str(bad)]) == 2


def test_kgb_service_error(corpus, tmp_path, capsys, monkeypatch):
    split = tmp_path / "s.jsonl"
    main(["build-dataset", "--in", str(corpus), "--out", str(split)])
    monkeypatch.setenv(ENDPOINT_ENV, "http://127.0.0.1:9/{lang}/annotate")
    assert main(["baseline", "--split", str(split), "--system", "kgb"]) == 3
    assert "entity-linking" in capsys.readouterr().err


def test_kgb_offline(corpus, tmp_path, capsys):
    split = tmp_path / "s.jsonl"
    main(["build-dataset", "--in", str(corpus), "--out", str(split)])
    fixtures = tmp_path / "kgb.json"
    fixtures.write_text("{}")
    report = tmp_path / "kgb.report.json"
    assert main(["baseline", "--split", str(split), "--system", "kgb", "--fixtures", str(fixtures),
                 "--out", str(report)]) == 0
    capsys.readouterr()
    data = json.loads(report.read_text())
    # nothing is linked, so every node lands in Other
    assert data["per_class"]["Other"]["recall"] == 1.0


def test_dry_run_prints_plan(corpus, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--in", str(corpus), "--out", str(out), "--dry-run"]) == 0
    text = capsys.readouterr().out
    assert "cleanse" in text and "train" in text
    assert not out.exists()


def test_run_is_deterministic(corpus, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["run", "--in", str(corpus), "--out", str(out), "--algorithm", "dtree"]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and "run.json" in names
    for name in names:
        if name != "run.json":
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
    report = json.loads((a / "events.dtree.report.json").read_text())
    assert report["provenance"]["seed"] == 0


def test_missing_input_stage_error(tmp_path):
    cfg = PipelineConfig(input=str(tmp_path / "nope.nq"), output_dir=str(tmp_path / "o"))
    with pytest.raises(StageError) as err:
        run_pipeline(cfg)
    assert "nope.nq" in str(err.value)


def test_config_file_and_overrides(corpus, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"input": str(corpus), "seed": 3, "algorithm": "gnb"}))
    cfg = PipelineConfig.load(str(cfg_path), {"seed": 5, "algorithm": None})
    assert cfg.seed == 5 and cfg.algorithm == "gnb"
    cfg_path.write_text(json.dumps({"input": str(corpus), "sed": 3}))
    with pytest.raises(ValueError, match="sed"):
        PipelineConfig.load(str(cfg_path), {})


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "markup_infer.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "gen-synthetic" in res.stdout
