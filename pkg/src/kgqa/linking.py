"""Fuzzy entity linking over the inverted n-gram index.

A detected span is resolved to graph entities by collecting index postings
for its n-grams highest order first (3, then 2, then 1), stopping early as
soon as the accumulated pool contains an entity whose canonical label
exactly equals the span text.  Candidates are then ranked by edit-distance
ratio to their canonical label, with in-degree and identifier order as
deterministic tie-breaks.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

from .graph import KnowledgeGraph
from .index import MAX_ORDER, InvertedIndex, extract_ngrams


def edit_distance(a: str, b: str) -> int:
    """Character edit distance with insert = delete = 1 and substitute = 2.

    A substitution costing the same as a delete-insert pair makes this the
    distance underlying the classic string-similarity ``ratio``.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,                            # delete from a
                current[j - 1] + 1,                         # insert into a
                previous[j - 1] + (0 if ca == cb else 2),   # match / substitute
            ))
        previous = current
    return previous[-1]


def levenshtein_ratio(a: str, b: str) -> float:
    """Similarity in [0, 1]: ``(|a| + |b| - distance) / (|a| + |b|)``.

    Two empty strings are identical, hence 1.0.
    """
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return (total - edit_distance(a, b)) / total


@dataclass
class CandidateEntity:
    """One linking candidate: entity id, which alias matched during
    retrieval, similarity to the canonical label, and the internal IDF
    retrieval weight (used only for pool capping, never for ranking)."""
    mid: str
    alias_index: int
    lev_score: float
    retrieval_weight: float


class EntityLinker:
    """Span -> ranked entity candidates.

    ``pool_cap`` bounds the candidate pool gathered from posting lists;
    when the union exceeds it, entries with the lowest accumulated IDF
    weight are dropped.  Set ``pool_cap=0`` to disable capping.
    """

    def __init__(self, index: InvertedIndex, kg: KnowledgeGraph, pool_cap: int = 500):
        self.index = index
        self.kg = kg
        self.pool_cap = pool_cap

    def link(self, span: Sequence[str], top_n: int = 50) -> list[CandidateEntity]:
        """Rank entities for a token span; ``[]`` when nothing is retrieved."""
        if top_n < 1:
            raise ValueError("top_n must be >= 1")
        if not span:
            raise ValueError("cannot link an empty span")
        span = list(span)
        span_text = " ".join(span)

        pool: dict[tuple[str, int], float] = {}
        labels: dict[str, str | None] = {}
        for n in range(MAX_ORDER, 0, -1):
            if len(span) >= n:
                for gram in extract_ngrams(span, n):
                    weight = self.index.idf(gram)
                    for posting in self.index.lookup(gram):
                        pool[posting] = pool.get(posting, 0.0) + weight
            if self._has_exact_match(pool, labels, span_text):
                break

        entries = sorted(pool.items(), key=lambda kv: (-kv[1], kv[0]))
        if self.pool_cap:
            entries = entries[: self.pool_cap]

        # One candidate per entity: keep its best-weight (then lowest-index)
        # alias entry for reporting.
        per_mid: dict[str, tuple[float, int]] = {}
        for (mid, alias_idx), weight in entries:
            kept = per_mid.get(mid)
            if kept is None or (-weight, alias_idx) < (-kept[0], kept[1]):
                per_mid[mid] = (weight, alias_idx)

        candidates = []
        for mid, (weight, alias_idx) in per_mid.items():
            label = labels.get(mid)
            if label is None:
                label = self.kg.canonical_label(mid)
            candidates.append(CandidateEntity(
                mid=mid,
                alias_index=alias_idx,
                lev_score=levenshtein_ratio(span_text, label or ""),
                retrieval_weight=weight,
            ))
        candidates.sort(key=lambda c: (-c.lev_score, -self.kg.in_degree_of(c.mid), c.mid))
        return candidates[:top_n]

    def _has_exact_match(self, pool, labels: dict[str, str | None], span_text: str) -> bool:
        for mid, _ in pool:
            if mid not in labels:
                labels[mid] = self.kg.canonical_label(mid)
            if labels[mid] == span_text:
                return True
        return False


def choose_span(spans: Sequence[tuple[int, int]], n_tokens: int) -> tuple[int, int]:
    """Pick the span to link: the longest one, leftmost on ties.

    When the tagger found nothing, fall back to the whole question — a
    guess beats abstention under exact-match scoring.
    """
    if not spans:
        return (0, n_tokens)
    return min(spans, key=lambda s: (-(s[1] - s[0]), s[0]))
