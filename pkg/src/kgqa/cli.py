"""Command-line pipeline driver.

Subcommands cover the full life cycle: ``make-synth`` (demo corpus),
``build-kg``, ``build-index``, ``project`` (distant supervision),
``train-ed``, ``train-rp``, ``link``, ``predict-rel``, ``answer``,
``evaluate``, and ``multirun``.  Configuration comes from a flat
``key=value`` file, overridable by flags; the ``KGQA_OUT`` environment
variable overrides the output directory.  Every command writes its
artifacts under the output directory, prints a one-line summary, and is
byte-deterministic given the same config and seeds.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import synth
from .annotate import EXACT, FAILED, FUZZY, project_entity, read_labeled_corpus, write_labeled_corpus
from .crf import CrfTagger
from .evaluation import RunReport, aggregate_runs, format_score
from .graph import KnowledgeGraph, load_knowledge_graph, normalize_mid, normalize_relation
from .index import InvertedIndex
from .integrate import IntegratorConfig
from .pipeline import QaPipeline, Question, evaluate_results, load_dataset
from .relation import EmbeddingTable, RelationClassifier
from .text import tokenize

log = logging.getLogger(__name__)

_SPLITS = ("train", "valid", "test")

# artifact file names under out_dir
KG_TRIPLES = "kg-triples.tsv"
KG_NAMES = "kg-names.tsv"
KG_WIKI = "kg-wiki.txt"
INDEX_FILE = "index.txt"
CRF_MODEL = "crf-model.txt"
LR_MODEL = "lr-model.txt"


@dataclass
class PipelineConfig:
    """Paths and hyperparameters for every stage."""
    triples: str = ""
    names: str = ""
    wiki: str = ""
    train: str = ""
    valid: str = ""
    test: str = ""
    embeddings: str = ""
    out_dir: str = "out"
    m: int = 50
    r: int = 5
    pool_cap: int = 500
    epsilon: float = 1e-9
    crf_l2: float = 1e-4
    crf_learning_rate: float = 0.2
    crf_decay: float = 0.05
    crf_epochs: int = 12
    crf_batch_size: int = 8
    crf_seed: int = 0
    rp_featurizer: str = "tfidf"
    rp_l2: float = 1e-4
    rp_learning_rate: float = 1.0
    rp_decay: float = 0.02
    rp_epochs: int = 30
    rp_batch_size: int = 32
    rp_seed: int = 0

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        cfg = cls()
        valid_names = set(cls.field_names())
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                key = key.strip()
                if key not in valid_names:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                cfg._set(key, value.strip())
        return cfg

    def _set(self, key: str, raw: str) -> None:
        current = getattr(self, key)
        if isinstance(current, int):
            value: object = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        else:
            value = raw
        setattr(self, key, value)

    def apply_overrides(self, args: argparse.Namespace) -> None:
        for name in self.field_names():
            value = getattr(args, name, None)
            if value is not None:
                setattr(self, name, value)
        env_out = os.environ.get("KGQA_OUT")
        if env_out:
            self.out_dir = env_out

    def require(self, *keys: str) -> None:
        """Named error for missing fields; referenced paths must exist."""
        for key in keys:
            value = getattr(self, key)
            if not value:
                raise SystemExit(f"error: config field '{key}' is required for this command")
            if not Path(value).exists():
                raise SystemExit(f"error: {key} path does not exist: {value}")

    def out_path(self, name: str) -> Path:
        return Path(self.out_dir) / name

    def artifact(self, name: str, producer: str) -> Path:
        """Path of a previously-built artifact; error if the stage never ran."""
        path = self.out_path(name)
        if not path.exists():
            raise SystemExit(f"error: missing artifact {path} - run '{producer}' first")
        return path


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    config_path = getattr(args, "config", None)
    cfg = PipelineConfig.from_file(config_path) if config_path else PipelineConfig()
    cfg.apply_overrides(args)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    return cfg


def _labeled_name(split: str) -> str:
    return f"{split}.labeled.tsv"


def _split_path(cfg: PipelineConfig, split: str) -> str:
    cfg.require(split)
    return getattr(cfg, split)


def _load_kg(cfg: PipelineConfig) -> KnowledgeGraph:
    return load_knowledge_graph(
        str(cfg.artifact(KG_TRIPLES, "build-kg")),
        str(cfg.artifact(KG_NAMES, "build-kg")),
        str(cfg.artifact(KG_WIKI, "build-kg")),
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_make_synth(args: argparse.Namespace) -> int:
    paths = synth.generate(args.out, seed=args.seed)
    print(f"make-synth: wrote corpus to {args.out} (config: {paths['config']})")
    return 0


def cmd_build_kg(args: argparse.Namespace) -> int:
    """Normalize and deduplicate the raw sources into canonical artifacts."""
    cfg = _load_config(args)
    cfg.require("triples", "names", "wiki")

    triples: set[tuple[str, str, str]] = set()
    with open(cfg.triples, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{cfg.triples}:{lineno}: expected 3 tab-separated fields")
            triples.add((normalize_mid(parts[0]), normalize_relation(parts[1]),
                         normalize_mid(parts[2])))
    mids = {s for s, _, _ in triples} | {o for _, _, o in triples}
    with open(cfg.out_path(KG_TRIPLES), "w", encoding="utf-8") as fh:
        for s, r, o in sorted(triples):
            fh.write(f"{s}\t{r}\t{o}\n")

    kept_names = skipped_names = 0
    with open(cfg.names, encoding="utf-8") as src, \
            open(cfg.out_path(KG_NAMES), "w", encoding="utf-8") as dst:
        for lineno, line in enumerate(src, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{cfg.names}:{lineno}: expected 2 tab-separated fields")
            mid = normalize_mid(parts[0])
            if mid not in mids:
                skipped_names += 1
                continue
            dst.write(f"{mid}\t{parts[1]}\n")
            kept_names += 1

    kept_wiki = skipped_wiki = 0
    with open(cfg.wiki, encoding="utf-8") as src, \
            open(cfg.out_path(KG_WIKI), "w", encoding="utf-8") as dst:
        for line in src:
            raw = line.strip()
            if not raw:
                continue
            mid = normalize_mid(raw)
            if mid not in mids:
                skipped_wiki += 1
                continue
            dst.write(mid + "\n")
            kept_wiki += 1

    print(f"build-kg: {len(triples)} triples, {len(mids)} entities, "
          f"{kept_names} names (skipped {skipped_names}), "
          f"{kept_wiki} wiki (skipped {skipped_wiki}) -> {cfg.out_dir}")
    return 0


def cmd_build_index(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    kg = _load_kg(cfg)
    index = InvertedIndex.build(kg)
    index.save(str(cfg.out_path(INDEX_FILE)))
    print(f"build-index: {len(index)} grams over {index.entry_count} aliases "
          f"-> {cfg.out_path(INDEX_FILE)}")
    return 0


def cmd_project(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    kg = _load_kg(cfg)
    done = 0
    for split in _SPLITS:
        if not getattr(cfg, split):
            continue
        questions = load_dataset(_split_path(cfg, split))
        labeled = [project_entity(q.tokens, q.subject, kg) for q in questions]
        write_labeled_corpus(str(cfg.out_path(_labeled_name(split))), labeled)
        counts = {kind: sum(1 for item in labeled if item.kind == kind)
                  for kind in (EXACT, FUZZY, FAILED)}
        print(f"project[{split}]: {len(labeled)} questions "
              f"(exact={counts[EXACT]} fuzzy={counts[FUZZY]} failed={counts[FAILED]}) "
              f"-> {cfg.out_path(_labeled_name(split))}")
        done += 1
    if not done:
        raise SystemExit("error: config field 'train' (or valid/test) is required for project")
    return 0


def _train_tagger(cfg: PipelineConfig) -> tuple[CrfTagger, int]:
    corpus = read_labeled_corpus(str(cfg.artifact(_labeled_name("train"), "project")))
    tagger = CrfTagger(
        l2=cfg.crf_l2, learning_rate=cfg.crf_learning_rate, decay=cfg.crf_decay,
        epochs=cfg.crf_epochs, batch_size=cfg.crf_batch_size, random_state=cfg.crf_seed)
    tagger.fit([item.tokens for item in corpus], [item.tags for item in corpus])
    tagger.save(str(cfg.out_path(CRF_MODEL)))
    return tagger, len(corpus)


def _train_classifier(cfg: PipelineConfig) -> tuple[RelationClassifier, int]:
    questions = load_dataset(_split_path(cfg, "train"))
    embeddings = None
    if cfg.rp_featurizer == "embed":
        cfg.require("embeddings")
        embeddings = EmbeddingTable.load(cfg.embeddings)
    classifier = RelationClassifier(
        featurizer=cfg.rp_featurizer, embeddings=embeddings,
        l2=cfg.rp_l2, learning_rate=cfg.rp_learning_rate, decay=cfg.rp_decay,
        epochs=cfg.rp_epochs, batch_size=cfg.rp_batch_size, random_state=cfg.rp_seed)
    classifier.fit([q.tokens for q in questions], [q.relation for q in questions])
    classifier.save(str(cfg.out_path(LR_MODEL)))
    return classifier, len(questions)


def cmd_train_ed(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    tagger, n = _train_tagger(cfg)
    print(f"train-ed: {n} examples, {len(tagger.feature_vocab_)} features, "
          f"final loss {tagger.loss_history_[-1]:.4f} -> {cfg.out_path(CRF_MODEL)}")
    return 0


def cmd_train_rp(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    classifier, n = _train_classifier(cfg)
    print(f"train-rp[{cfg.rp_featurizer}]: {n} examples, "
          f"{len(classifier.classes_)} relations, "
          f"final loss {classifier.loss_history_[-1]:.4f} -> {cfg.out_path(LR_MODEL)}")
    return 0


def _build_pipeline(cfg: PipelineConfig, need_tagger: bool = True,
                    need_classifier: bool = True) -> QaPipeline:
    kg = _load_kg(cfg)
    index = tagger = classifier = None
    if need_tagger:
        index = InvertedIndex.load(str(cfg.artifact(INDEX_FILE, "build-index")))
        tagger = CrfTagger.load(str(cfg.artifact(CRF_MODEL, "train-ed")))
    if need_classifier:
        path = cfg.artifact(LR_MODEL, "train-rp")
        embeddings = EmbeddingTable.load(cfg.embeddings) \
            if cfg.rp_featurizer == "embed" and cfg.embeddings else None
        classifier = RelationClassifier.load(str(path), embeddings=embeddings)
    return QaPipeline(kg, index, tagger, classifier,
                      IntegratorConfig(cfg.m, cfg.r, cfg.epsilon), cfg.pool_cap)


def cmd_link(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pipeline = _build_pipeline(cfg, need_classifier=False)
    questions = load_dataset(_split_path(cfg, args.split))
    out = cfg.out_path(f"link-{args.split}.tsv")
    with open(out, "w", encoding="utf-8") as fh:
        for q in questions:
            _, _, entities = pipeline.entity_candidates(q.tokens)
            for rank, (mid, score) in enumerate(entities, start=1):
                fh.write(f"{q.qid}\t{rank}\t{mid}\t{score!r}\n")
    print(f"link[{args.split}]: {len(questions)} questions -> {out}")
    return 0


def cmd_predict_rel(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pipeline = _build_pipeline(cfg, need_tagger=False)
    questions = load_dataset(_split_path(cfg, args.split))
    out = cfg.out_path(f"relations-{args.split}.tsv")
    with open(out, "w", encoding="utf-8") as fh:
        for q in questions:
            ranked = pipeline.relation_candidates(q.tokens)
            for rank, (relation, prob) in enumerate(ranked, start=1):
                fh.write(f"{q.qid}\t{rank}\t{relation}\t{prob!r}\n")
    print(f"predict-rel[{args.split}]: {len(questions)} questions -> {out}")
    return 0


def cmd_answer(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    entity_table = import_external_scores(args.entity_scores) \
        if args.entity_scores else None
    relation_table = import_external_scores(args.relation_scores) \
        if args.relation_scores else None
    pipeline = _build_pipeline(cfg, need_tagger=entity_table is None,
                               need_classifier=relation_table is None)
    # an ad-hoc question is qid "0" for external score files
    question = Question(qid="0", text=args.question, tokens=tokenize(args.question))
    result = pipeline.process(
        question,
        entity_override=None if entity_table is None else entity_table.get("0", []),
        relation_override=None if relation_table is None else relation_table.get("0", []),
    )
    if not result.answers:
        print("no-answer")
        return 0
    top = result.answers[0]
    print(f"{top.mid}\t{top.relation}\t{top.score:.6f}")
    return 0


def import_external_scores(path: str) -> dict[str, list[tuple[str, float]]]:
    """Read a ``qid<TAB>item<TAB>score`` dump into per-question ranked lists.

    Lists are sorted by descending score (item string breaking ties);
    malformed lines raise with their line number.
    """
    table: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            qid, item, score = fields
            try:
                value = float(score)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad score {score!r}") from exc
            table.setdefault(qid, []).append((item, value))
    for items in table.values():
        items.sort(key=lambda pair: (-pair[1], pair[0]))
    return table


def _filter_overrides(table, questions, what: str):
    if table is None:
        return None
    known = {q.qid for q in questions}
    unknown = sorted(set(table) - known)
    if unknown:
        log.warning("%s scores: skipping %d unknown qids (first: %s)",
                    what, len(unknown), unknown[0])
    return {qid: items for qid, items in table.items() if qid in known}


def _run_evaluation(cfg: PipelineConfig, split: str,
                    entity_scores: str | None, relation_scores: str | None):
    entity_table = import_external_scores(entity_scores) if entity_scores else None
    relation_table = import_external_scores(relation_scores) if relation_scores else None
    pipeline = _build_pipeline(cfg, need_tagger=entity_table is None,
                               need_classifier=relation_table is None)
    questions = load_dataset(_split_path(cfg, split))
    results = pipeline.run(
        questions,
        entity_overrides=_filter_overrides(entity_table, questions, "entity"),
        relation_overrides=_filter_overrides(relation_table, questions, "relation"),
    )
    return results, evaluate_results(results, pipeline.kg)


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    results, metrics = _run_evaluation(cfg, args.split, args.entity_scores,
                                       args.relation_scores)
    report = cfg.out_path(f"report-{args.split}.tsv")
    with open(report, "w", encoding="utf-8") as fh:
        for name, value in metrics.items():
            fh.write(f"{name}\t{value!r}\n")
    answers = cfg.out_path(f"answers-{args.split}.tsv")
    with open(answers, "w", encoding="utf-8") as fh:
        for result in results:
            for rank, t in enumerate(result.answers, start=1):
                fh.write(f"{result.question.qid}\t{rank}\t{t.mid}\t{t.relation}\t{t.score!r}\n")
    summary = " ".join(f"{name}={format_score(100 * value)}"
                       for name, value in metrics.items())
    print(f"evaluate[{args.split}]: {summary}")
    return 0


def cmd_multirun(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if args.seeds < 1:
        raise SystemExit("error: --seeds must be >= 1")
    per_metric: dict[str, list[float]] = {}
    seeds: list[int] = []
    base_crf, base_rp = cfg.crf_seed, cfg.rp_seed
    for run in range(args.seeds):
        cfg.crf_seed = base_crf + run
        cfg.rp_seed = base_rp + run
        seeds.append(base_crf + run)
        _train_tagger(cfg)
        _train_classifier(cfg)
        _, metrics = _run_evaluation(cfg, args.split, None, None)
        for name, value in metrics.items():
            per_metric.setdefault(name, []).append(100 * value)
    report = RunReport(
        {name: aggregate_runs(values) for name, values in per_metric.items()},
        seeds)
    out = cfg.out_path(f"multirun-{args.split}.tsv")
    with open(out, "w", encoding="utf-8") as fh:
        for line in report.lines():
            fh.write(line + "\n")
    for line in report.lines():
        name, summary = line.split("\t")
        print(f"multirun[{args.split}]: {name} = {summary}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file")
    for name in PipelineConfig.field_names():
        default = getattr(PipelineConfig(), name)
        flag = "--" + name.replace("_", "-")
        if isinstance(default, int):
            sub.add_argument(flag, type=int, default=None)
        elif isinstance(default, float):
            sub.add_argument(flag, type=float, default=None)
        else:
            sub.add_argument(flag, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgqa",
        description="Simple question answering over a knowledge graph: "
                    "a fully non-neural baseline pipeline.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("make-synth", help="generate the bundled synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_make_synth)

    for name, handler, help_text in [
        ("build-kg", cmd_build_kg, "normalize the graph sources"),
        ("build-index", cmd_build_index, "build the n-gram inverted index"),
        ("project", cmd_project, "backproject entity names into training tags"),
        ("train-ed", cmd_train_ed, "train the CRF entity detector"),
        ("train-rp", cmd_train_rp, "train the relation classifier"),
    ]:
        p = subs.add_parser(name, help=help_text)
        _add_config_flags(p)
        p.set_defaults(handler=handler)

    for name, handler, help_text in [
        ("link", cmd_link, "dump ranked entity candidates for a split"),
        ("predict-rel", cmd_predict_rel, "dump ranked relations for a split"),
    ]:
        p = subs.add_parser(name, help=help_text)
        _add_config_flags(p)
        p.add_argument("--split", choices=_SPLITS, default="valid")
        p.set_defaults(handler=handler)

    p = subs.add_parser("answer", help="answer a single question")
    _add_config_flags(p)
    p.add_argument("question")
    p.add_argument("--entity-scores", help="external qid/item/score TSV (the question is qid 0)")
    p.add_argument("--relation-scores", help="external qid/item/score TSV (the question is qid 0)")
    p.set_defaults(handler=cmd_answer)

    p = subs.add_parser("evaluate", help="run all metrics over a split")
    _add_config_flags(p)
    p.add_argument("--split", choices=_SPLITS, default="valid")
    p.add_argument("--entity-scores", help="external qid/item/score TSV replacing detection+linking")
    p.add_argument("--relation-scores", help="external qid/item/score TSV replacing relation prediction")
    p.set_defaults(handler=cmd_evaluate)

    p = subs.add_parser("multirun", help="train and evaluate across several seeds")
    _add_config_flags(p)
    p.add_argument("--split", choices=_SPLITS, default="valid")
    p.add_argument("--seeds", type=int, required=True, help="number of runs")
    p.set_defaults(handler=cmd_multirun)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except SystemExit as exc:
        # argparse exits carry ints; our diagnostics carry the message
        if exc.code is None or isinstance(exc.code, int):
            raise
        print(exc.code, file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
