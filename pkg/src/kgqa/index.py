"""Inverted index from name n-grams (n in {1, 2, 3}) to entity postings.

Every alias of every entity is indexed under all of its contiguous token
windows of length 1 to 3.  A posting is a ``(mid, alias_index)`` pair;
posting lists are deduplicated and sorted, so lookups and snapshots are
deterministic.  Document frequencies support an IDF weight used by the
linker to cap pathological candidate pools (stopword-like unigrams can
match a large fraction of all names).
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from .graph import KnowledgeGraph

MAX_ORDER = 3

SNAPSHOT_HEADER = "kgqa-index v1"

Gram = tuple[str, ...]
Posting = tuple[str, int]


def extract_ngrams(tokens: Sequence[str], n: int) -> list[Gram]:
    """All contiguous token windows of length ``n``, in order, duplicates kept."""
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"n-gram order must be in 1..{MAX_ORDER}, got {n}")
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


class InvertedIndex:
    """n-gram -> posting list map over entity aliases."""

    def __init__(self, postings: dict[Gram, list[Posting]], entry_count: int):
        self._postings = postings
        self.entry_count = entry_count

    @classmethod
    def build(cls, kg: KnowledgeGraph) -> "InvertedIndex":
        """Index every alias of every named entity in the graph."""
        acc: dict[Gram, set[Posting]] = {}
        entries = 0
        for mid in kg.mids_with_aliases():
            for alias_idx, alias in enumerate(kg.aliases_of(mid)):
                entries += 1
                for n in range(1, min(len(alias), MAX_ORDER) + 1):
                    for gram in extract_ngrams(alias, n):
                        acc.setdefault(gram, set()).add((mid, alias_idx))
        postings = {gram: sorted(entries_) for gram, entries_ in acc.items()}
        return cls(postings, entries)

    def lookup(self, gram: Sequence[str]) -> list[Posting]:
        """Deduplicated postings for a gram; ``[]`` when absent."""
        return self._postings.get(tuple(gram), [])

    def doc_freq(self, gram: Sequence[str]) -> int:
        return len(self._postings.get(tuple(gram), ()))

    def idf(self, gram: Sequence[str]) -> float:
        """log(1 + entries/df); 0 for grams absent from the index."""
        df = self.doc_freq(gram)
        if df == 0:
            return 0.0
        return math.log(1.0 + self.entry_count / df)

    def __len__(self) -> int:
        return len(self._postings)

    def __iter__(self):
        return iter(self._postings)

    # -- persistence ---------------------------------------------------

    def save(self, path: str) -> None:
        """Write the line-oriented snapshot; loading it back is bit-exact."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(SNAPSHOT_HEADER + "\n")
            for gram in sorted(self._postings, key=lambda g: (len(g), g)):
                text = " ".join(gram)
                for mid, alias_idx in self._postings[gram]:
                    fh.write(f"{len(gram)}\t{text}\t{mid}\t{alias_idx}\n")

    @classmethod
    def load(cls, path: str) -> "InvertedIndex":
        postings: dict[Gram, set[Posting]] = {}
        aliases: set[Posting] = set()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != SNAPSHOT_HEADER:
                raise ValueError(f"{path}: unsupported index header {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 4:
                    raise ValueError(f"{path}:{lineno}: expected 4 fields")
                n, text, mid, alias_idx = fields
                gram = tuple(text.split(" "))
                if len(gram) != int(n):
                    raise ValueError(f"{path}:{lineno}: order {n} does not match gram {text!r}")
                posting = (mid, int(alias_idx))
                postings.setdefault(gram, set()).add(posting)
                aliases.add(posting)
        final = {gram: sorted(entries) for gram, entries in postings.items()}
        return cls(final, len(aliases))
