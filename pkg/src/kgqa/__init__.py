"""Simple question answering over a knowledge graph, without neural nets.

The pipeline decomposes the task into entity detection (linear-chain CRF),
entity linking (n-gram inverted index + edit-distance ranking), relation
prediction (logistic regression over tf-idf or averaged-embedding
features), and evidence integration (product scores with popularity
tie-breaks).
"""

from .annotate import LabeledQuestion, project_entity, read_labeled_corpus, write_labeled_corpus
from .crf import (
    ENTITY,
    NOT_ENTITY,
    CrfTagger,
    extract_features,
    extract_spans,
    log_likelihood_and_grad,
    log_partition_and_marginals,
    viterbi_decode,
)
from .evaluation import (
    RunReport,
    RunStats,
    aggregate_runs,
    end_to_end_accuracy,
    recall_at_n,
    span_prf,
)
from .graph import KnowledgeGraph, load_knowledge_graph, normalize_mid, normalize_relation
from .index import InvertedIndex, extract_ngrams
from .integrate import AnswerTuple, IntegratorConfig, integrate
from .linking import CandidateEntity, EntityLinker, choose_span, edit_distance, levenshtein_ratio
from .pipeline import QaPipeline, Question, evaluate_results, load_dataset
from .relation import (
    EmbeddingFeaturizer,
    EmbeddingTable,
    RelationClassifier,
    TfidfFeaturizer,
    fit_relation_terms,
)
from .text import join_tokens, tokenize

__version__ = "0.1.0"

__all__ = [
    "AnswerTuple",
    "CandidateEntity",
    "CrfTagger",
    "ENTITY",
    "EmbeddingFeaturizer",
    "EmbeddingTable",
    "EntityLinker",
    "IntegratorConfig",
    "InvertedIndex",
    "KnowledgeGraph",
    "LabeledQuestion",
    "NOT_ENTITY",
    "QaPipeline",
    "Question",
    "RelationClassifier",
    "RunReport",
    "RunStats",
    "TfidfFeaturizer",
    "aggregate_runs",
    "choose_span",
    "edit_distance",
    "end_to_end_accuracy",
    "evaluate_results",
    "extract_features",
    "extract_ngrams",
    "extract_spans",
    "fit_relation_terms",
    "integrate",
    "join_tokens",
    "levenshtein_ratio",
    "load_dataset",
    "load_knowledge_graph",
    "log_likelihood_and_grad",
    "log_partition_and_marginals",
    "normalize_mid",
    "normalize_relation",
    "project_entity",
    "read_labeled_corpus",
    "recall_at_n",
    "span_prf",
    "tokenize",
    "viterbi_decode",
    "write_labeled_corpus",
]
