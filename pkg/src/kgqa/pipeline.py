"""End-to-end wiring: question in, ranked (entity, relation) answers out.

The pipeline chains the trained tagger, the index-backed linker, the
relation classifier, and the integrator.  Either candidate stage can be
replaced per question by externally-supplied scored lists, which is how
stronger (e.g. neural) detectors or classifiers plug into the same
evaluation harness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from collections.abc import Sequence

from .annotate import project_entity
from .crf import CrfTagger, extract_spans
from .evaluation import end_to_end_accuracy, recall_at_n, span_prf
from .graph import KnowledgeGraph, normalize_mid, normalize_relation
from .index import InvertedIndex
from .integrate import AnswerTuple, IntegratorConfig, integrate
from .linking import EntityLinker, choose_span
from .relation import RelationClassifier
from .text import tokenize

log = logging.getLogger(__name__)

LINKING_CUTOFFS = (1, 5, 20, 50)
RELATION_CUTOFFS = (1, 5)


@dataclass
class Question:
    """One benchmark example: the question plus its gold fact, if known."""
    qid: str
    text: str
    tokens: list[str]
    subject: str | None = None
    relation: str | None = None


def load_dataset(path: str) -> list[Question]:
    """Read a split file: ``subject<TAB>relation<TAB>object<TAB>question``.

    Question ids are the 0-based position in the file.
    """
    questions: list[Question] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            subject, relation, _obj, text = fields
            questions.append(Question(
                qid=str(len(questions)),
                text=text,
                tokens=tokenize(text),
                subject=normalize_mid(subject),
                relation=normalize_relation(relation),
            ))
    return questions


@dataclass
class QuestionResult:
    """Everything the evaluator needs about one processed question."""
    question: Question
    tags: list[str] | None
    span: tuple[int, int] | None
    entities: list[tuple[str, float]] = field(default_factory=list)
    relations: list[tuple[str, float]] = field(default_factory=list)
    answers: list[AnswerTuple] = field(default_factory=list)

    @property
    def top_answer(self) -> tuple[str, str] | None:
        if not self.answers:
            return None
        return (self.answers[0].mid, self.answers[0].relation)


class QaPipeline:
    """Answering pipeline over a fixed graph, index, and trained models.

    ``tagger`` or ``classifier`` may be None when the corresponding stage
    is always overridden by external candidate lists.
    """

    def __init__(
        self,
        kg: KnowledgeGraph,
        index: InvertedIndex | None = None,
        tagger: CrfTagger | None = None,
        classifier: RelationClassifier | None = None,
        config: IntegratorConfig | None = None,
        pool_cap: int = 500,
    ):
        self.kg = kg
        self.tagger = tagger
        self.classifier = classifier
        self.config = config or IntegratorConfig()
        self.linker = EntityLinker(index, kg, pool_cap) if index is not None else None

    # Candidate lists are computed deeper than the integrator consumes so
    # that recall@50 / recall@5 stay measurable with the default m and r.
    def _entity_depth(self) -> int:
        return max(self.config.m, LINKING_CUTOFFS[-1])

    def _relation_depth(self) -> int:
        return max(self.config.r, RELATION_CUTOFFS[-1])

    def detect(self, tokens: Sequence[str]) -> tuple[list[str], tuple[int, int]]:
        """Tag the question and choose the span to link (longest Entity
        run; the whole question when the tagger finds none)."""
        if self.tagger is None:
            raise ValueError("pipeline has no entity tagger")
        tags = self.tagger.predict([list(tokens)])[0]
        return tags, choose_span(extract_spans(tags), len(tokens))

    def entity_candidates(self, tokens: Sequence[str]) -> tuple[list[str], tuple[int, int], list[tuple[str, float]]]:
        tags, span = self.detect(tokens)
        if self.linker is None:
            raise ValueError("pipeline has no entity linker index")
        start, end = span
        span_tokens = list(tokens[start:end])
        candidates = self.linker.link(span_tokens, self._entity_depth()) if span_tokens else []
        return tags, span, [(c.mid, c.lev_score) for c in candidates]

    def relation_candidates(self, tokens: Sequence[str]) -> list[tuple[str, float]]:
        if self.classifier is None:
            raise ValueError("pipeline has no relation classifier")
        return self.classifier.predict_topk(list(tokens), self._relation_depth())

    def process(
        self,
        question: Question,
        entity_override: list[tuple[str, float]] | None = None,
        relation_override: list[tuple[str, float]] | None = None,
    ) -> QuestionResult:
        if entity_override is None:
            tags, span, entities = self.entity_candidates(question.tokens)
        else:
            tags, span, entities = None, None, entity_override
        relations = self.relation_candidates(question.tokens) \
            if relation_override is None else relation_override
        answers = integrate(
            entities[: self.config.m], relations[: self.config.r], self.kg, self.config)
        return QuestionResult(question, tags, span, entities, relations, answers)

    def answer(self, text: str) -> list[AnswerTuple]:
        """Answer a raw question string."""
        question = Question(qid="adhoc", text=text, tokens=tokenize(text))
        return self.process(question).answers

    def run(
        self,
        questions: Sequence[Question],
        entity_overrides: dict[str, list[tuple[str, float]]] | None = None,
        relation_overrides: dict[str, list[tuple[str, float]]] | None = None,
    ) -> list[QuestionResult]:
        """Process a split; when an override table is given, questions
        missing from it get empty candidates for that stage."""
        results = []
        for question in questions:
            results.append(self.process(
                question,
                entity_override=None if entity_overrides is None
                else entity_overrides.get(question.qid, []),
                relation_override=None if relation_overrides is None
                else relation_overrides.get(question.qid, []),
            ))
        return results


def evaluate_results(results: Sequence[QuestionResult], kg: KnowledgeGraph) -> dict[str, float]:
    """All per-split metrics; detection scores only when the tagger ran.

    Detection ground truth is reconstructed by projecting the gold
    entity's name onto the question, exactly as the training tags were.
    """
    metrics: dict[str, float] = {}
    tagged = [r for r in results if r.tags is not None]
    if tagged:
        predicted = [extract_spans(r.tags) for r in tagged]
        gold = [extract_spans(project_entity(r.question.tokens, r.question.subject, kg).tags)
                for r in tagged]
        p, r_, f1 = span_prf(predicted, gold)
        metrics["detection_precision"] = p
        metrics["detection_recall"] = r_
        metrics["detection_f1"] = f1

    gold_mids = [r.question.subject for r in results]
    ranked_mids = [[mid for mid, _ in r.entities] for r in results]
    for n in LINKING_CUTOFFS:
        metrics[f"linking_r@{n}"] = recall_at_n(ranked_mids, gold_mids, n)

    gold_relations = [r.question.relation for r in results]
    ranked_relations = [[rel for rel, _ in r.relations] for r in results]
    for n in RELATION_CUTOFFS:
        metrics[f"relation_r@{n}"] = recall_at_n(ranked_relations, gold_relations, n)

    metrics["accuracy"] = end_to_end_accuracy(
        [r.top_answer for r in results],
        [(r.question.subject, r.question.relation) for r in results],
    )
    return metrics
