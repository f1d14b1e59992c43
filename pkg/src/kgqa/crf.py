"""Linear-chain CRF for tagging question tokens as Entity / NotEntity.

Three layers live here:

* feature templates over token windows (:func:`extract_features`),
* exact chain-level inference on score tables — forward-backward
  (:func:`log_partition_and_marginals`), Viterbi (:func:`viterbi_decode`)
  and the log-likelihood gradient (:func:`log_likelihood_and_grad`) — all
  generic in the number of tags so they can be verified against brute-force
  path enumeration,
* :class:`CrfTagger`, a scikit-learn style estimator that owns the sparse
  feature vocabulary and trains by L2-regularized maximum conditional
  likelihood with mini-batch gradient ascent.

All inference is done in log space.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

# ufunc reduction: far less per-call overhead than scipy's logsumexp on
# the tiny arrays a 2-tag chain produces
_logsumexp = np.logaddexp.reduce

log = logging.getLogger(__name__)

NOT_ENTITY = "NotEntity"
ENTITY = "Entity"
# NotEntity first: ties in decoding prefer the lower tag id.
TAGS = (NOT_ENTITY, ENTITY)
TAG_TO_ID = {tag: i for i, tag in enumerate(TAGS)}

MODEL_HEADER = "kgqa-crf v1"

_AFFIX_LENGTHS = (1, 2, 3, 4)
_BOS = "<s>"
_EOS = "</s>"


# ---------------------------------------------------------------------------
# feature templates
# ---------------------------------------------------------------------------

def token_shape(token: str) -> str:
    """Character-class sketch of a token with runs collapsed.

    Lowercase -> ``x``, uppercase -> ``X``, digit -> ``d``, anything else
    kept verbatim: ``token_shape("u.s.") == "x.x."``, ``"1984" -> "d"``.
    """
    out: list[str] = []
    for ch in token:
        if ch.islower():
            cls = "x"
        elif ch.isupper():
            cls = "X"
        elif ch.isdigit():
            cls = "d"
        else:
            cls = ch
        if not out or out[-1] != cls:
            out.append(cls)
    return "".join(out)


def extract_features(tokens: Sequence[str], i: int) -> list[str]:
    """Feature strings for position ``i``: token identities of a 3-window,
    character affixes of lengths 1-4, word shape, and position buckets."""
    if not 0 <= i < len(tokens):
        raise IndexError(f"position {i} out of range for {len(tokens)} tokens")
    tok = tokens[i]
    prev_tok = tokens[i - 1] if i > 0 else _BOS
    next_tok = tokens[i + 1] if i + 1 < len(tokens) else _EOS
    feats = [f"w0={tok}", f"w-1={prev_tok}", f"w+1={next_tok}"]
    for k in _AFFIX_LENGTHS:
        if len(tok) >= k:
            feats.append(f"pre{k}={tok[:k]}")
            feats.append(f"suf{k}={tok[-k:]}")
    feats.append(f"shape={token_shape(tok)}")
    last = len(tokens) - 1
    if i == 0:
        feats.append("pos=first")
    if i == last:
        feats.append("pos=last")
    if 0 < i < last:
        feats.append("pos=interior")
    return feats


# ---------------------------------------------------------------------------
# chain-level exact inference
# ---------------------------------------------------------------------------

def log_partition_and_marginals(
    emissions: np.ndarray,
    transitions: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Forward-backward over a (L, K) emission table.

    Returns ``(log_z, node_marginals (L, K), edge_marginals (L-1, K, K))``.
    Marginals sum to 1 per position / per edge slice.
    """
    emissions = np.asarray(emissions, dtype=float)
    length, n_tags = emissions.shape
    if length < 1:
        raise ValueError("sequence length must be >= 1")

    alpha = np.empty((length, n_tags))
    alpha[0] = start + emissions[0]
    for t in range(1, length):
        alpha[t] = emissions[t] + _logsumexp(alpha[t - 1][:, None] + transitions, axis=0)
    log_z = float(_logsumexp(alpha[-1] + stop))

    beta = np.empty((length, n_tags))
    beta[-1] = stop
    for t in range(length - 2, -1, -1):
        beta[t] = _logsumexp(transitions + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)

    node = np.exp(alpha + beta - log_z)
    edge = np.empty((length - 1, n_tags, n_tags))
    for t in range(length - 1):
        edge[t] = np.exp(
            alpha[t][:, None] + transitions + (emissions[t + 1] + beta[t + 1])[None, :] - log_z
        )
    return log_z, node, edge


def viterbi_decode(
    emissions: np.ndarray,
    transitions: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Highest-scoring tag path and its score.

    Ties resolve to the lexicographically smallest tag sequence (tag 0,
    NotEntity, sorts first).  The backward best-completion table makes the
    left-to-right greedy reconstruction exact: at each step the candidates
    compared are the very values the max was taken over, so float ties are
    reproducible.
    """
    emissions = np.asarray(emissions, dtype=float)
    length, n_tags = emissions.shape
    if length < 1:
        raise ValueError("sequence length must be >= 1")

    # best[t, y]: max score of any suffix path starting at t with tag y.
    best = np.empty((length, n_tags))
    best[-1] = emissions[-1] + stop
    for t in range(length - 2, -1, -1):
        best[t] = emissions[t] + np.max(transitions + best[t + 1][None, :], axis=1)

    first = start + best[0]
    score = float(np.max(first))
    tags = np.empty(length, dtype=np.int64)
    tags[0] = int(np.argmax(first))  # argmax picks the lowest index on ties
    for t in range(1, length):
        tags[t] = int(np.argmax(transitions[tags[t - 1]] + best[t]))
    return tags, score


def path_score(
    emissions: np.ndarray,
    transitions: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
    tags: Sequence[int],
) -> float:
    """Unnormalized score of one tag path."""
    total = float(start[tags[0]] + emissions[0, tags[0]])
    for t in range(1, len(tags)):
        total += float(transitions[tags[t - 1], tags[t]] + emissions[t, tags[t]])
    return total + float(stop[tags[-1]])


def log_likelihood_and_grad(
    emissions: np.ndarray,
    transitions: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
    tags: Sequence[int],
):
    """Conditional log-likelihood of ``tags`` and its gradient.

    Gradients are observed-minus-expected feature counts, returned with
    respect to the emission table, the transition matrix, and the boundary
    vectors.
    """
    log_z, node, edge = log_partition_and_marginals(emissions, transitions, start, stop)
    ll = path_score(emissions, transitions, start, stop, tags) - log_z

    g_emissions = -node
    for t, y in enumerate(tags):
        g_emissions[t, y] += 1.0
    g_transitions = -edge.sum(axis=0) if len(tags) > 1 else np.zeros_like(transitions)
    for t in range(len(tags) - 1):
        g_transitions[tags[t], tags[t + 1]] += 1.0
    g_start = -node[0].copy()
    g_start[tags[0]] += 1.0
    g_stop = -node[-1].copy()
    g_stop[tags[-1]] += 1.0
    return ll, g_emissions, g_transitions, g_start, g_stop


def extract_spans(tags: Sequence[str]) -> list[tuple[int, int]]:
    """Half-open ``(start, end)`` spans of maximal Entity runs, left to right."""
    spans: list[tuple[int, int]] = []
    start = None
    for i, tag in enumerate(tags):
        if tag == ENTITY:
            if start is None:
                start = i
        elif start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(tags)))
    return spans


# ---------------------------------------------------------------------------
# estimator
# ---------------------------------------------------------------------------

class CrfTagger(BaseEstimator):
    """Entity / NotEntity tagger trained by maximum conditional likelihood.

    Parameters
    ----------
    l2 : float
        L2 regularization strength applied to all weight groups.
    learning_rate : float
        Initial gradient-ascent step size.
    decay : float
        Step decays as ``learning_rate / (1 + decay * epoch)``.
    epochs : int
        Passes over the training data.
    batch_size : int
        Mini-batch size; gradients are averaged within a batch.
    random_state : int
        Seed for the epoch shuffles; training is deterministic given it.

    Attributes (after ``fit``)
    --------------------------
    feature_vocab_ : dict mapping feature string -> dense id (frozen).
    emission_weights_ : (n_features, 2) array.
    transitions_, start_weights_, stop_weights_ : transition tables.
    loss_history_ : regularized mean NLL after each epoch.
    n_rejected_ : training pairs dropped for token/tag length mismatch.
    """

    def __init__(self, l2: float = 1e-4, learning_rate: float = 0.2,
                 decay: float = 0.05, epochs: int = 12, batch_size: int = 8,
                 random_state: int = 0):
        self.l2 = l2
        self.learning_rate = learning_rate
        self.decay = decay
        self.epochs = epochs
        self.batch_size = batch_size
        self.random_state = random_state

    # -- fitting -------------------------------------------------------

    def fit(self, X: Sequence[Sequence[str]], y: Sequence[Sequence[str]]) -> "CrfTagger":
        """Train on (token sequence, tag sequence) pairs.

        Pairs whose tag length does not match the token length are rejected
        with a logged warning naming the example index.
        """
        if len(X) != len(y):
            raise ValueError(f"got {len(X)} token sequences but {len(y)} tag sequences")
        kept: list[tuple[list[list[str]], np.ndarray]] = []
        self.n_rejected_ = 0
        for idx, (tokens, tags) in enumerate(zip(X, y)):
            if len(tokens) != len(tags) or len(tokens) == 0:
                log.warning("rejecting example %d: %d tokens vs %d tags",
                            idx, len(tokens), len(tags))
                self.n_rejected_ += 1
                continue
            feats = [extract_features(tokens, i) for i in range(len(tokens))]
            tag_ids = np.array([TAG_TO_ID[t] for t in tags], dtype=np.int64)
            kept.append((feats, tag_ids))
        if not kept:
            raise ValueError("no usable training examples")

        vocab: dict[str, int] = {}
        for feats, _ in kept:
            for position in feats:
                for feat in position:
                    if feat not in vocab:
                        vocab[feat] = len(vocab)
        self.feature_vocab_ = vocab

        encoded = [
            ([np.array([vocab[f] for f in position], dtype=np.int64) for position in feats], tag_ids)
            for feats, tag_ids in kept
        ]

        n_tags = len(TAGS)
        self.emission_weights_ = np.zeros((len(vocab), n_tags))
        self.transitions_ = np.zeros((n_tags, n_tags))
        self.start_weights_ = np.zeros(n_tags)
        self.stop_weights_ = np.zeros(n_tags)

        rng = np.random.default_rng(self.random_state)
        n = len(encoded)
        batch = max(1, min(self.batch_size, n))
        self.loss_history_ = []
        for epoch in range(self.epochs):
            lr = self.learning_rate / (1.0 + self.decay * epoch)
            order = rng.permutation(n)
            epoch_loss = 0.0
            for lo in range(0, n, batch):
                members = order[lo:lo + batch]
                epoch_loss += self._ascend(encoded, members, lr) * len(members)
            self.loss_history_.append(epoch_loss / n)
        return self

    def _ascend(self, encoded, members, lr: float) -> float:
        """One mini-batch ascent step; returns the pre-update batch loss
        (mean NLL plus the regularizer, so full-batch training reports the
        exact objective at each epoch start)."""
        g_emit = np.zeros_like(self.emission_weights_)
        g_trans = np.zeros_like(self.transitions_)
        g_start = np.zeros_like(self.start_weights_)
        g_stop = np.zeros_like(self.stop_weights_)
        total_ll = 0.0
        for j in members:
            feat_ids, tag_ids = encoded[j]
            emissions = self._emissions(feat_ids)
            ll, ge, gt, gs, gp = log_likelihood_and_grad(
                emissions, self.transitions_, self.start_weights_, self.stop_weights_, tag_ids)
            total_ll += ll
            for t, ids in enumerate(feat_ids):
                g_emit[ids] += ge[t]
            g_trans += gt
            g_start += gs
            g_stop += gp
        loss = -total_ll / len(members) + self._regularizer()
        scale = lr / len(members)
        self.emission_weights_ += scale * g_emit - lr * self.l2 * self.emission_weights_
        self.transitions_ += scale * g_trans - lr * self.l2 * self.transitions_
        self.start_weights_ += scale * g_start - lr * self.l2 * self.start_weights_
        self.stop_weights_ += scale * g_stop - lr * self.l2 * self.stop_weights_
        return loss

    def _regularizer(self) -> float:
        return 0.5 * self.l2 * (
            float(np.sum(self.emission_weights_ ** 2))
            + float(np.sum(self.transitions_ ** 2))
            + float(np.sum(self.start_weights_ ** 2))
            + float(np.sum(self.stop_weights_ ** 2))
        )

    def _emissions(self, feat_ids) -> np.ndarray:
        out = np.zeros((len(feat_ids), len(TAGS)))
        for t, ids in enumerate(feat_ids):
            if len(ids):
                out[t] = self.emission_weights_[ids].sum(axis=0)
        return out

    def _encode_tokens(self, tokens: Sequence[str]) -> list[np.ndarray]:
        vocab = self.feature_vocab_
        ids = []
        for i in range(len(tokens)):
            active = [vocab[f] for f in extract_features(tokens, i) if f in vocab]
            ids.append(np.array(active, dtype=np.int64))
        return ids

    def _check_fitted(self) -> None:
        if not hasattr(self, "emission_weights_"):
            raise NotFittedError("CrfTagger is not fitted; call fit() or load()")

    # -- inference -----------------------------------------------------

    def predict(self, X: Sequence[Sequence[str]]) -> list[list[str]]:
        """Viterbi tag sequence for each token sequence.

        Features unseen at training time contribute nothing (closed-world
        vocabulary); an empty token sequence maps to an empty tag list.
        """
        self._check_fitted()
        out = []
        for tokens in X:
            if not tokens:
                out.append([])
                continue
            feat_ids = self._encode_tokens(tokens)
            tags, _ = viterbi_decode(
                self._emissions(feat_ids), self.transitions_,
                self.start_weights_, self.stop_weights_)
            out.append([TAGS[t] for t in tags])
        return out

    def predict_marginals(self, tokens: Sequence[str]) -> np.ndarray:
        """Per-position tag posteriors, shape (len(tokens), 2)."""
        self._check_fitted()
        feat_ids = self._encode_tokens(tokens)
        _, node, _ = log_partition_and_marginals(
            self._emissions(feat_ids), self.transitions_,
            self.start_weights_, self.stop_weights_)
        return node

    # -- persistence ---------------------------------------------------

    def save(self, path: str) -> None:
        """Versioned text snapshot; save -> load -> save is byte-identical."""
        self._check_fitted()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(MODEL_HEADER + "\n")
            for name in ("l2", "learning_rate", "decay"):
                fh.write(f"param\t{name}\t{getattr(self, name)!r}\n")
            for name in ("epochs", "batch_size", "random_state"):
                fh.write(f"param\t{name}\t{getattr(self, name)}\n")
            fh.write(f"vocab\t{len(self.feature_vocab_)}\n")
            for feat, fid in sorted(self.feature_vocab_.items(), key=lambda kv: kv[1]):
                fh.write(f"{feat}\t{fid}\n")
            for fid in range(self.emission_weights_.shape[0]):
                for tid, tag in enumerate(TAGS):
                    w = float(self.emission_weights_[fid, tid])
                    if w != 0.0:
                        fh.write(f"emission\t{fid}\t{tag}\t{w!r}\n")
            for a, tag_a in enumerate(TAGS):
                for b, tag_b in enumerate(TAGS):
                    fh.write(f"transition\t{tag_a}\t{tag_b}\t{float(self.transitions_[a, b])!r}\n")
            for tid, tag in enumerate(TAGS):
                fh.write(f"start\t{tag}\t{float(self.start_weights_[tid])!r}\n")
            for tid, tag in enumerate(TAGS):
                fh.write(f"stop\t{tag}\t{float(self.stop_weights_[tid])!r}\n")

    @classmethod
    def load(cls, path: str) -> "CrfTagger":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != MODEL_HEADER:
                raise ValueError(f"{path}: unsupported model header {header!r}")
            params: dict[str, float | int] = {}
            line = fh.readline().rstrip("\n")
            while line.startswith("param\t"):
                _, name, value = line.split("\t")
                params[name] = int(value) if name in ("epochs", "batch_size", "random_state") \
                    else float(value)
                line = fh.readline().rstrip("\n")
            kind, count = line.split("\t")
            if kind != "vocab":
                raise ValueError(f"{path}: expected vocab section, got {line!r}")
            vocab: dict[str, int] = {}
            for _ in range(int(count)):
                feat, fid = fh.readline().rstrip("\n").rsplit("\t", 1)
                vocab[feat] = int(fid)
            model = cls(**params)  # type: ignore[arg-type]
            model.feature_vocab_ = vocab
            n_tags = len(TAGS)
            model.emission_weights_ = np.zeros((len(vocab), n_tags))
            model.transitions_ = np.zeros((n_tags, n_tags))
            model.start_weights_ = np.zeros(n_tags)
            model.stop_weights_ = np.zeros(n_tags)
            for line in fh:
                fields = line.rstrip("\n").split("\t")
                if fields[0] == "emission":
                    _, fid, tag, w = fields
                    model.emission_weights_[int(fid), TAG_TO_ID[tag]] = float(w)
                elif fields[0] == "transition":
                    _, tag_a, tag_b, w = fields
                    model.transitions_[TAG_TO_ID[tag_a], TAG_TO_ID[tag_b]] = float(w)
                elif fields[0] == "start":
                    _, tag, w = fields
                    model.start_weights_[TAG_TO_ID[tag]] = float(w)
                elif fields[0] == "stop":
                    _, tag, w = fields
                    model.stop_weights_[TAG_TO_ID[tag]] = float(w)
                else:
                    raise ValueError(f"{path}: unknown record {fields[0]!r}")
            model.loss_history_ = []
            model.n_rejected_ = 0
        return model
