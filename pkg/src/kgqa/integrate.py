"""Evidence integration: cross entity and relation candidates into answers.

Every (entity, relation) pair from the two candidate lists is scored by
the product of its component scores.  Pairs for which the graph holds no
such fact are pruned.  Scoring ties — typical when several graph nodes
share one label — are resolved by entity popularity (in-degree), then by
the presence of a Wikipedia mapping, then by identifier order so the
ranking is a total deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

from .graph import KnowledgeGraph


@dataclass
class IntegratorConfig:
    """Candidate list sizes and the float band treated as a scoring tie."""
    m: int = 50
    r: int = 5
    epsilon: float = 1e-9

    def __post_init__(self) -> None:
        if self.m < 1 or self.r < 1:
            raise ValueError("candidate counts m and r must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass
class AnswerTuple:
    mid: str
    relation: str
    score: float
    in_degree: int = 0
    has_wiki: bool = False


def integrate(
    entities: Sequence[tuple[str, float]],
    relations: Sequence[tuple[str, float]],
    kg: KnowledgeGraph,
    config: IntegratorConfig | None = None,
) -> list[AnswerTuple]:
    """Ranked answers from already-truncated candidate lists.

    ``entities`` are (mid, score) and ``relations`` are (relation,
    probability) pairs.  Consecutive scores within ``config.epsilon`` of
    each other form one tie group that is reordered by the popularity
    keys.  Empty output means the question goes unanswered.
    """
    cfg = config or IntegratorConfig()
    answers = [
        AnswerTuple(
            mid=mid,
            relation=relation,
            score=entity_score * prob,
            in_degree=kg.in_degree_of(mid),
            has_wiki=kg.has_wiki(mid),
        )
        for mid, entity_score in entities
        for relation, prob in relations
        if kg.valid_pair(mid, relation)
    ]
    answers.sort(key=_tie_key)
    return _reorder_tie_groups(answers, cfg.epsilon)


def _tie_key(t: AnswerTuple):
    return (-t.score, -t.in_degree, not t.has_wiki, t.mid, t.relation)


def _reorder_tie_groups(answers: list[AnswerTuple], epsilon: float) -> list[AnswerTuple]:
    # Chain consecutive near-equal scores into one group, then rank the
    # group purely by the popularity keys (score differences below the
    # band are float noise, not evidence).
    out: list[AnswerTuple] = []
    group: list[AnswerTuple] = []
    for answer in answers:
        if group and group[-1].score - answer.score > epsilon:
            out.extend(_rank_group(group))
            group = []
        group.append(answer)
    out.extend(_rank_group(group))
    return out


def _rank_group(group: list[AnswerTuple]) -> list[AnswerTuple]:
    if len(group) > 1:
        group.sort(key=lambda t: (-t.in_degree, not t.has_wiki, t.mid, t.relation))
    return group
