import os

import pytest

from kgqa.cli import PipelineConfig, import_external_scores, main
from kgqa.pipeline import load_dataset


def test_config_file_parsing(tmp_path):
    cfg_path = tmp_path / "kgqa.cfg"
    cfg_path.write_text(
        "# comment\ntriples=/data/t.tsv\nm=20\nepsilon=1e-6\nrp_featurizer=embed\n",
        encoding="utf-8")
    cfg = PipelineConfig.from_file(str(cfg_path))
    assert cfg.triples == "/data/t.tsv"
    assert cfg.m == 20
    assert cfg.epsilon == 1e-6
    assert cfg.rp_featurizer == "embed"
    assert cfg.r == 5  # untouched default


def test_config_rejects_unknown_key(tmp_path):
    cfg_path = tmp_path / "kgqa.cfg"
    cfg_path.write_text("no_such_key=1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown config key"):
        PipelineConfig.from_file(str(cfg_path))


def test_flag_overrides_config(tmp_path, synth_config, capsys):
    out = tmp_path / "flagged"
    code = main(["build-kg", "--config", synth_config, "--out-dir", str(out)])
    assert code == 0
    assert (out / "kg-triples.tsv").exists()
    assert "build-kg:" in capsys.readouterr().out


def test_env_var_overrides_out_dir(tmp_path, synth_config, monkeypatch):
    target = tmp_path / "env-out"
    monkeypatch.setenv("KGQA_OUT", str(target))
    assert main(["build-kg", "--config", synth_config]) == 0
    assert (target / "kg-triples.tsv").exists()


def test_missing_config_field_is_named_error(tmp_path, capsys):
    code = main(["build-kg", "--out-dir", str(tmp_path)])
    assert code == 1
    assert "triples" in capsys.readouterr().err


def test_stage_before_dependency_names_artifact(tmp_path, synth_config, capsys):
    out = tmp_path / "empty-out"
    code = main(["evaluate", "--config", synth_config, "--out-dir", str(out),
                 "--split", "test"])
    assert code == 1
    err = capsys.readouterr().err
    assert "missing artifact" in err
    assert "build-kg" in err


def test_full_flow_and_idempotence(trained_artifacts, capsys, tmp_path):
    cfg = PipelineConfig.from_file(trained_artifacts)
    out = cfg.out_dir

    assert main(["link", "--config", trained_artifacts, "--split", "valid"]) == 0
    assert main(["predict-rel", "--config", trained_artifacts, "--split", "valid"]) == 0
    link_dump = os.path.join(out, "link-valid.tsv")
    rel_dump = os.path.join(out, "relations-valid.tsv")
    first_link = open(link_dump, "rb").read()
    first_rel = open(rel_dump, "rb").read()

    # idempotence: byte-identical artifacts on identical config and seed
    assert main(["link", "--config", trained_artifacts, "--split", "valid"]) == 0
    assert main(["predict-rel", "--config", trained_artifacts, "--split", "valid"]) == 0
    assert open(link_dump, "rb").read() == first_link
    assert open(rel_dump, "rb").read() == first_rel

    model_path = os.path.join(out, "crf-model.txt")
    before = open(model_path, "rb").read()
    assert main(["train-ed", "--config", trained_artifacts]) == 0
    assert open(model_path, "rb").read() == before
    capsys.readouterr()


def test_answer_command(trained_artifacts, capsys):
    assert main(["answer", "--config", trained_artifacts,
                 "where was sasha vujacic born?"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    mid, relation, score = line.split("\t")
    assert relation == "people/person/place_of_birth"
    assert 0.0 < float(score) <= 1.0


def test_evaluate_writes_report(trained_artifacts, capsys):
    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid"]) == 0
    out = capsys.readouterr().out
    assert "accuracy=" in out
    cfg = PipelineConfig.from_file(trained_artifacts)
    report = open(os.path.join(cfg.out_dir, "report-valid.tsv")).read()
    assert "linking_r@50\t" in report


def test_import_external_scores_parses_and_sorts(tmp_path):
    path = tmp_path / "scores.tsv"
    path.write_text("1\tm.b\t0.5\n0\tm.a\t0.9\n1\tm.c\t0.8\n", encoding="utf-8")
    table = import_external_scores(str(path))
    assert table["0"] == [("m.a", 0.9)]
    assert table["1"] == [("m.c", 0.8), ("m.b", 0.5)]


def test_import_external_scores_malformed_line(tmp_path):
    path = tmp_path / "scores.tsv"
    path.write_text("0\tm.a\tnot-a-number\n", encoding="utf-8")
    with pytest.raises(ValueError, match="scores.tsv:1"):
        import_external_scores(str(path))
    path.write_text("0\tm.a\n", encoding="utf-8")
    with pytest.raises(ValueError, match="3 tab-separated"):
        import_external_scores(str(path))


def test_evaluate_with_gold_relation_scores(trained_artifacts, tmp_path, capsys):
    """Perfect external relation scores leave accuracy bounded only by
    the entity stage."""
    cfg = PipelineConfig.from_file(trained_artifacts)
    questions = load_dataset(cfg.valid)
    scores = tmp_path / "gold-relations.tsv"
    with open(scores, "w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(f"{q.qid}\t{q.relation}\t1.0\n")
    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid",
                 "--relation-scores", str(scores)]) == 0
    out = capsys.readouterr().out
    metrics = dict(part.split("=") for part in out.split(": ", 1)[1].split())
    assert float(metrics["relation_r@1"]) == 100.0
    assert float(metrics["accuracy"]) >= float(metrics["linking_r@1"]) - 5.0


def test_evaluate_with_empty_entity_scores_zeroes_accuracy(
        trained_artifacts, tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("", encoding="utf-8")
    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid",
                 "--entity-scores", str(empty)]) == 0
    out = capsys.readouterr().out
    metrics = dict(part.split("=") for part in out.split(": ", 1)[1].split())
    assert float(metrics["accuracy"]) == 0.0
    assert float(metrics["linking_r@50"]) == 0.0
    assert "detection_f1" not in metrics


def test_evaluate_mixed_external_entities_with_internal_relations(
        trained_artifacts, tmp_path, capsys):
    cfg = PipelineConfig.from_file(trained_artifacts)
    questions = load_dataset(cfg.valid)
    scores = tmp_path / "gold-entities.tsv"
    with open(scores, "w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(f"{q.qid}\t{q.subject}\t1.0\n")
        fh.write("not-a-qid\tm.0\t1.0\n")  # unknown qid: warned and skipped
    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid",
                 "--entity-scores", str(scores)]) == 0
    out = capsys.readouterr().out
    metrics = dict(part.split("=") for part in out.split(": ", 1)[1].split())
    assert float(metrics["linking_r@1"]) == 100.0
    assert float(metrics["accuracy"]) > 90.0


def test_answer_with_external_scores(trained_artifacts, tmp_path, capsys):
    # the ad-hoc question is qid 0; force a different relation externally
    scores = tmp_path / "rel.tsv"
    scores.write_text("0\tpeople/person/nationality\t1.0\n", encoding="utf-8")
    assert main(["answer", "--config", trained_artifacts,
                 "--relation-scores", str(scores),
                 "where was sasha vujacic born?"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    if line != "no-answer":  # pruned when the entity lacks the relation
        assert line.split("\t")[1] == "people/person/nationality"


def test_evaluate_report_invariant_to_question_order(
        trained_artifacts, tmp_path, capsys):
    cfg = PipelineConfig.from_file(trained_artifacts)
    rows = open(cfg.valid, encoding="utf-8").read().splitlines()
    shuffled = tmp_path / "shuffled.tsv"
    shuffled.write_text("\n".join(reversed(rows)) + "\n", encoding="utf-8")

    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid"]) == 0
    baseline = open(os.path.join(cfg.out_dir, "report-valid.tsv"), "rb").read()
    assert main(["evaluate", "--config", trained_artifacts, "--split", "valid",
                 "--valid", str(shuffled)]) == 0
    assert open(os.path.join(cfg.out_dir, "report-valid.tsv"), "rb").read() == baseline
    capsys.readouterr()


def test_multirun_reports_mean_min_max(trained_artifacts, capsys):
    assert main(["multirun", "--config", trained_artifacts, "--split", "valid",
                 "--seeds", "2"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith("multirun[")]
    assert any("accuracy" in l for l in lines)
    for line in lines:
        summary = line.split(" = ")[1]
        assert "[" in summary and summary.endswith("]")


def test_make_synth_writes_corpus(tmp_path, capsys):
    out = tmp_path / "corpus"
    assert main(["make-synth", "--out", str(out), "--seed", "123"]) == 0
    for name in ("triples.tsv", "names.tsv", "wiki.txt", "train.tsv",
                 "valid.tsv", "test.tsv", "embeddings.txt", "kgqa.cfg"):
        assert (out / name).exists()
