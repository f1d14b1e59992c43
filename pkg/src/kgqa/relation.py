"""Relation prediction: multiclass logistic regression over the question.

Two interchangeable featurizers feed the same softmax classifier:

* :class:`TfidfFeaturizer` — tf-idf over question unigrams and bigrams,
  L2-normalized, vocabulary and document frequencies fitted on the
  training questions only;
* :class:`EmbeddingFeaturizer` — the mean of the question tokens' word
  embeddings concatenated with a binary indicator vector over the most
  frequent terms occurring in relation names (``people/person/place_of_birth``
  contributes ``people person place of birth``), which lets the linear
  model latch onto strong cue tokens.

The classifier itself minimizes L2-regularized multinomial negative
log-likelihood by seeded mini-batch gradient descent, starting from zero
weights, so an untrained model predicts the uniform distribution.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from collections.abc import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import softmax
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

log = logging.getLogger(__name__)

MODEL_HEADER = "kgqa-lr v1"

DEFAULT_MAX_RELATION_TERMS = 300

_TERM_SPLIT = re.compile(r"[/_]+")


def split_relation_terms(relation: str) -> list[str]:
    """Lowercased terms of a relation name, split on ``/`` and ``_``."""
    return [t for t in _TERM_SPLIT.split(relation.lower()) if t]


def fit_relation_terms(relations: Sequence[str],
                       max_terms: int = DEFAULT_MAX_RELATION_TERMS) -> list[str]:
    """Most frequent relation-name terms over the given gold relations.

    ``relations`` is one entry per training example, so frequency is
    example-weighted.  Ordered by descending count, ties alphabetically.
    """
    if not relations:
        raise ValueError("need at least one relation")
    counts: Counter[str] = Counter()
    for relation in relations:
        counts.update(split_relation_terms(relation))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [term for term, _ in ranked[:max_terms]]


# ---------------------------------------------------------------------------
# featurizers
# ---------------------------------------------------------------------------

def _question_grams(tokens: Sequence[str]):
    for tok in tokens:
        yield (tok,)
    for i in range(len(tokens) - 1):
        yield (tokens[i], tokens[i + 1])


class TfidfFeaturizer(BaseEstimator):
    """tf-idf over unigrams and bigrams with smoothed idf and L2 rows.

    ``idf = ln((1 + N) / (1 + df)) + 1``; grams unseen in training are
    dropped, and an all-unknown question maps to the zero vector.
    """

    def fit(self, X: Sequence[Sequence[str]], y=None) -> "TfidfFeaturizer":
        df: Counter[tuple[str, ...]] = Counter()
        for tokens in X:
            df.update(set(_question_grams(tokens)))
        vocab = {gram: col for col, gram in
                 enumerate(sorted(df, key=lambda g: (len(g), g)))}
        n_docs = len(X)
        idf = np.empty(len(vocab))
        for gram, col in vocab.items():
            idf[col] = np.log((1.0 + n_docs) / (1.0 + df[gram])) + 1.0
        self.vocabulary_ = vocab
        self.idf_ = idf
        self.n_docs_ = n_docs
        return self

    @property
    def dimension(self) -> int:
        return len(self.vocabulary_)

    def transform(self, X: Sequence[Sequence[str]]) -> sp.csr_matrix:
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError("TfidfFeaturizer is not fitted")
        data: list[float] = []
        indices: list[int] = []
        indptr = [0]
        for tokens in X:
            tf: Counter[int] = Counter()
            for gram in _question_grams(tokens):
                col = self.vocabulary_.get(gram)
                if col is not None:
                    tf[col] += 1
            cols = sorted(tf)
            values = np.array([tf[c] * self.idf_[c] for c in cols])
            norm = np.linalg.norm(values)
            if norm > 0:
                values /= norm
            indices.extend(cols)
            data.extend(values)
            indptr.append(len(indices))
        return sp.csr_matrix((data, indices, indptr),
                             shape=(len(X), len(self.vocabulary_)))


class EmbeddingTable:
    """token -> fixed-dimension vector map read from a text file."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int, source: str = ""):
        self.vectors = vectors
        self.dim = dim
        self.source = source

    @classmethod
    def load(cls, path: str) -> "EmbeddingTable":
        """Parse ``token v1 v2 ... vD`` lines; every row must share one D."""
        vectors: dict[str, np.ndarray] = {}
        dim: int | None = None
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.rstrip("\n").split(" ")
                if len(parts) < 2:
                    if line.strip():
                        raise ValueError(f"{path}:{lineno}: malformed embedding line")
                    continue
                token, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                elif len(values) != dim:
                    raise ValueError(
                        f"{path}:{lineno}: dimension {len(values)} != {dim}")
                vectors[token] = np.array(values, dtype=float)
        if dim is None:
            raise ValueError(f"{path}: empty embedding file")
        return cls(vectors, dim, source=path)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)


class EmbeddingFeaturizer(BaseEstimator):
    """Mean word embedding concatenated with relation-term indicators.

    Tokens missing from the table are skipped from the average (no UNK
    vector); a question with no known token gets a zero embedding block.
    The indicator block is binary: slot ``k`` is 1.0 iff the question
    contains relation term ``k``.
    """

    def __init__(self, embeddings: EmbeddingTable,
                 max_terms: int = DEFAULT_MAX_RELATION_TERMS):
        self.embeddings = embeddings
        self.max_terms = max_terms

    def fit(self, X: Sequence[Sequence[str]], y: Sequence[str]) -> "EmbeddingFeaturizer":
        """Fit the indicator slots from the gold relations ``y``."""
        self.relation_terms_ = fit_relation_terms(y, self.max_terms)
        self.term_slots_ = {t: k for k, t in enumerate(self.relation_terms_)}
        return self

    @property
    def dimension(self) -> int:
        return self.embeddings.dim + len(self.relation_terms_)

    def transform(self, X: Sequence[Sequence[str]]) -> np.ndarray:
        if not hasattr(self, "relation_terms_"):
            raise NotFittedError("EmbeddingFeaturizer is not fitted")
        out = np.zeros((len(X), self.dimension))
        dim = self.embeddings.dim
        for row, tokens in enumerate(X):
            known = [self.embeddings.get(t) for t in tokens]
            known = [v for v in known if v is not None]
            if known:
                out[row, :dim] = np.mean(known, axis=0)
            for tok in tokens:
                slot = self.term_slots_.get(tok)
                if slot is not None:
                    out[row, dim + slot] = 1.0
        return out


# ---------------------------------------------------------------------------
# softmax core
# ---------------------------------------------------------------------------

def softmax_loss_and_grad(weights: np.ndarray, bias: np.ndarray, X, y: np.ndarray,
                          l2: float):
    """Mean regularized NLL of a batch and its gradients.

    ``X`` may be dense or CSR; ``y`` holds class ids.  The bias is left
    unregularized.
    """
    logits = X @ weights.T + bias
    probs = softmax(logits, axis=1)
    n = X.shape[0]
    nll = -float(np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    loss = nll + 0.5 * l2 * float(np.sum(weights ** 2))
    probs[np.arange(n), y] -= 1.0
    probs /= n
    g_weights = (X.T @ probs).T + l2 * weights
    g_bias = probs.sum(axis=0)
    return loss, np.asarray(g_weights), g_bias


class RelationClassifier(BaseEstimator):
    """Softmax regression over relations with a pluggable featurizer.

    Parameters
    ----------
    featurizer : "tfidf" or "embed"
    embeddings : EmbeddingTable, required for the "embed" featurizer.
    max_terms : size cap of the relation-term indicator block.
    l2, learning_rate, decay, epochs, batch_size, random_state :
        optimizer knobs; training is deterministic given ``random_state``.
    """

    def __init__(self, featurizer: str = "tfidf",
                 embeddings: EmbeddingTable | None = None,
                 max_terms: int = DEFAULT_MAX_RELATION_TERMS,
                 l2: float = 1e-4, learning_rate: float = 1.0,
                 decay: float = 0.02, epochs: int = 30, batch_size: int = 32,
                 random_state: int = 0):
        self.featurizer = featurizer
        self.embeddings = embeddings
        self.max_terms = max_terms
        self.l2 = l2
        self.learning_rate = learning_rate
        self.decay = decay
        self.epochs = epochs
        self.batch_size = batch_size
        self.random_state = random_state

    def _make_featurizer(self):
        if self.featurizer == "tfidf":
            return TfidfFeaturizer()
        if self.featurizer == "embed":
            if self.embeddings is None:
                raise ValueError("the embed featurizer needs an EmbeddingTable")
            return EmbeddingFeaturizer(self.embeddings, self.max_terms)
        raise ValueError(f"unknown featurizer {self.featurizer!r}")

    def fit(self, X: Sequence[Sequence[str]], y: Sequence[str]) -> "RelationClassifier":
        """Train on (question tokens, gold relation) pairs."""
        if len(X) != len(y):
            raise ValueError(f"got {len(X)} questions but {len(y)} relations")
        classes = sorted(set(y))
        if len(classes) < 2:
            raise ValueError("training data must contain at least 2 relation classes")
        self.classes_ = classes
        self.class_to_id_ = {c: i for i, c in enumerate(classes)}
        labels = np.array([self.class_to_id_[r] for r in y], dtype=np.int64)

        self.featurizer_ = self._make_featurizer()
        self.featurizer_.fit(X, y)
        matrix = self.featurizer_.transform(X)

        n, dim = matrix.shape
        self.weights_ = np.zeros((len(classes), dim))
        self.bias_ = np.zeros(len(classes))

        rng = np.random.default_rng(self.random_state)
        batch = max(1, min(self.batch_size, n))
        self.loss_history_ = []
        for epoch in range(self.epochs):
            lr = self.learning_rate / (1.0 + self.decay * epoch)
            order = rng.permutation(n)
            for lo in range(0, n, batch):
                members = order[lo:lo + batch]
                loss, g_w, g_b = softmax_loss_and_grad(
                    self.weights_, self.bias_, matrix[members], labels[members], self.l2)
                self.weights_ -= lr * g_w
                self.bias_ -= lr * g_b
            full_loss, _, _ = softmax_loss_and_grad(
                self.weights_, self.bias_, matrix, labels, self.l2)
            self.loss_history_.append(full_loss)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "weights_"):
            raise NotFittedError("RelationClassifier is not fitted; call fit() or load()")

    def predict_proba(self, X: Sequence[Sequence[str]]) -> np.ndarray:
        self._check_fitted()
        matrix = self.featurizer_.transform(X)
        return softmax(matrix @ self.weights_.T + self.bias_, axis=1)

    def predict(self, X: Sequence[Sequence[str]]) -> list[str]:
        probs = self.predict_proba(X)
        return [self.classes_[i] for i in np.argmax(probs, axis=1)]

    def predict_topk(self, tokens: Sequence[str], k: int) -> list[tuple[str, float]]:
        """Top-``k`` (relation, probability), ties broken by class id."""
        if k < 1:
            raise ValueError("k must be >= 1")
        probs = self.predict_proba([list(tokens)])[0]
        order = sorted(range(len(probs)), key=lambda c: (-probs[c], c))
        return [(self.classes_[c], float(probs[c])) for c in order[:k]]

    # -- persistence ---------------------------------------------------

    def save(self, path: str) -> None:
        """Versioned text snapshot; save -> load -> save is byte-identical."""
        self._check_fitted()
        feat = self.featurizer_
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(MODEL_HEADER + "\n")
            fh.write(f"featurizer\t{self.featurizer}\n")
            for name in ("l2", "learning_rate", "decay"):
                fh.write(f"param\t{name}\t{getattr(self, name)!r}\n")
            for name in ("max_terms", "epochs", "batch_size", "random_state"):
                fh.write(f"param\t{name}\t{getattr(self, name)}\n")
            fh.write(f"classes\t{len(self.classes_)}\n")
            for cid, relation in enumerate(self.classes_):
                fh.write(f"{cid}\t{relation}\n")
            if self.featurizer == "tfidf":
                fh.write(f"tfidf\t{len(feat.vocabulary_)}\t{feat.n_docs_}\n")
                for gram, col in sorted(feat.vocabulary_.items(), key=lambda kv: kv[1]):
                    fh.write(f"{col}\t{' '.join(gram)}\t{float(feat.idf_[col])!r}\n")
            else:
                fh.write(f"embeddings\t{self.embeddings.source}\n")
                fh.write(f"terms\t{len(feat.relation_terms_)}\n")
                for slot, term in enumerate(feat.relation_terms_):
                    fh.write(f"{slot}\t{term}\n")
            fh.write(f"weights\t{self.weights_.shape[0]}\t{self.weights_.shape[1]}\n")
            for cid in range(self.weights_.shape[0]):
                row = " ".join(repr(float(v)) for v in self.weights_[cid])
                fh.write(f"w\t{cid}\t{row}\n")
            fh.write("b\t" + " ".join(repr(float(v)) for v in self.bias_) + "\n")

    @classmethod
    def load(cls, path: str, embeddings: EmbeddingTable | None = None) -> "RelationClassifier":
        """Restore a snapshot.

        For embed models the table is re-read from the path recorded at
        save time unless an ``embeddings`` override is supplied.
        """
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != MODEL_HEADER:
                raise ValueError(f"{path}: unsupported model header {header!r}")
            kind = fh.readline().rstrip("\n").split("\t")[1]
            params: dict[str, float | int] = {}
            line = fh.readline().rstrip("\n")
            while line.startswith("param\t"):
                _, name, value = line.split("\t")
                params[name] = float(value) if name in ("l2", "learning_rate", "decay") \
                    else int(value)
                line = fh.readline().rstrip("\n")
            tag, n_classes = line.split("\t")
            if tag != "classes":
                raise ValueError(f"{path}: expected classes section, got {line!r}")
            classes = []
            for _ in range(int(n_classes)):
                _, relation = fh.readline().rstrip("\n").split("\t", 1)
                classes.append(relation)

            model = cls(featurizer=kind, embeddings=embeddings, **params)  # type: ignore[arg-type]
            model.classes_ = classes
            model.class_to_id_ = {c: i for i, c in enumerate(classes)}

            line = fh.readline().rstrip("\n")
            if kind == "tfidf":
                _, vocab_size, n_docs = line.split("\t")
                feat = TfidfFeaturizer()
                vocab: dict[tuple[str, ...], int] = {}
                idf = np.empty(int(vocab_size))
                for _ in range(int(vocab_size)):
                    col, text, value = fh.readline().rstrip("\n").split("\t")
                    vocab[tuple(text.split(" "))] = int(col)
                    idf[int(col)] = float(value)
                feat.vocabulary_ = vocab
                feat.idf_ = idf
                feat.n_docs_ = int(n_docs)
            else:
                _, source = line.split("\t", 1)
                if embeddings is None:
                    embeddings = EmbeddingTable.load(source)
                    model.embeddings = embeddings
                feat = EmbeddingFeaturizer(embeddings, params.get("max_terms", DEFAULT_MAX_RELATION_TERMS))
                _, n_terms = fh.readline().rstrip("\n").split("\t")
                terms = []
                for _ in range(int(n_terms)):
                    _, term = fh.readline().rstrip("\n").split("\t", 1)
                    terms.append(term)
                feat.relation_terms_ = terms
                feat.term_slots_ = {t: k for k, t in enumerate(terms)}
            model.featurizer_ = feat

            _, n_rows, n_cols = fh.readline().rstrip("\n").split("\t")
            weights = np.zeros((int(n_rows), int(n_cols)))
            for _ in range(int(n_rows)):
                _, cid, row = fh.readline().rstrip("\n").split("\t")
                weights[int(cid)] = [float(v) for v in row.split(" ")] if row else []
            model.weights_ = weights
            _, brow = fh.readline().rstrip("\n").split("\t")
            model.bias_ = np.array([float(v) for v in brow.split(" ")])
            model.loss_history_ = []
        return model
