"""Distant supervision: project gold entity names onto question tokens.

The benchmark gives the queried entity as a graph identifier, not as a
character span, so tagger training data is produced by matching the
entity's names against the question.  An exact pass looks for an alias
occurring verbatim as a token window; when none does, a fuzzy pass picks
the window whose joined text is closest in edit distance to any alias.
Failed projections (entity has no name at all) are kept as all-NotEntity
examples so the noise stays visible in corpus statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

from .crf import ENTITY, NOT_ENTITY
from .graph import KnowledgeGraph
from .linking import edit_distance

EXACT = "exact"
FUZZY = "fuzzy"
FAILED = "failed"

# Fuzzy candidate windows may exceed the longest alias by this many tokens;
# anything longer is projection noise rather than a plausible mention.
FUZZY_EXTRA_TOKENS = 2

_TAG_TO_CHAR = {ENTITY: "I", NOT_ENTITY: "O"}
_CHAR_TO_TAG = {"I": ENTITY, "O": NOT_ENTITY}


@dataclass
class LabeledQuestion:
    tokens: list[str]
    tags: list[str]
    kind: str  # exact | fuzzy | failed


def project_entity(tokens: Sequence[str], subject: str, kg: KnowledgeGraph) -> LabeledQuestion:
    """Tag the window of ``tokens`` that realizes ``subject``'s name.

    Exact pass: the longest alias appearing verbatim as a contiguous token
    window wins (leftmost occurrence, then lowest alias index, on ties).
    Fuzzy pass: over windows of length 1..(longest alias + 2), the window
    minimizing character edit distance to the nearest alias wins (ties:
    shorter window, then leftmost).
    """
    tokens = list(tokens)
    aliases = kg.aliases_of(subject)
    if not aliases or not tokens:
        return LabeledQuestion(tokens, [NOT_ENTITY] * len(tokens), FAILED)

    best_exact: tuple[int, int, int] | None = None  # (-length, start, alias_idx)
    for alias_idx, alias in enumerate(aliases):
        width = len(alias)
        if width > len(tokens):
            continue
        for start in range(len(tokens) - width + 1):
            if tuple(tokens[start:start + width]) == alias:
                key = (-width, start, alias_idx)
                if best_exact is None or key < best_exact:
                    best_exact = key
                break  # later starts of the same alias cannot beat this one
    if best_exact is not None:
        width, start = -best_exact[0], best_exact[1]
        return LabeledQuestion(tokens, _window_tags(len(tokens), start, start + width), EXACT)

    alias_texts = [" ".join(a) for a in aliases]
    max_width = min(len(tokens), max(len(a) for a in aliases) + FUZZY_EXTRA_TOKENS)
    best: tuple[int, int, int] | None = None  # (distance, width, start)
    for width in range(1, max_width + 1):
        for start in range(len(tokens) - width + 1):
            window = " ".join(tokens[start:start + width])
            dist = min(edit_distance(window, text) for text in alias_texts)
            key = (dist, width, start)
            if best is None or key < best:
                best = key
    assert best is not None
    _, width, start = best
    return LabeledQuestion(tokens, _window_tags(len(tokens), start, start + width), FUZZY)


def _window_tags(length: int, start: int, end: int) -> list[str]:
    tags = [NOT_ENTITY] * length
    for i in range(start, end):
        tags[i] = ENTITY
    return tags


def tags_to_chars(tags: Sequence[str]) -> str:
    return " ".join(_TAG_TO_CHAR[t] for t in tags)


def chars_to_tags(text: str) -> list[str]:
    return [_CHAR_TO_TAG[c] for c in text.split()]


def write_labeled_corpus(path: str, items: Sequence[LabeledQuestion]) -> None:
    """TSV rows ``tokens<TAB>I/O tags<TAB>kind``, the tagger's training input."""
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(f"{' '.join(item.tokens)}\t{tags_to_chars(item.tags)}\t{item.kind}\n")


def read_labeled_corpus(path: str) -> list[LabeledQuestion]:
    items: list[LabeledQuestion] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            tokens = fields[0].split()
            tags = chars_to_tags(fields[1])
            if len(tokens) != len(tags):
                raise ValueError(f"{path}:{lineno}: {len(tokens)} tokens vs {len(tags)} tags")
            items.append(LabeledQuestion(tokens, tags, fields[2]))
    return items
