"""Deterministic tokenization shared by every stage of the pipeline.

Training data, indexed entity names, and incoming questions must all pass
through :func:`tokenize` so that string comparisons across stages are
byte-for-byte consistent.  The rule set is intentionally small and fully
documented (see README, "Tokenization rules"):

1. split on whitespace;
2. detach the punctuation characters ``. , ? ! ; : " ( ) [ ]`` from the
   start and end of each chunk, repeatedly;
3. split the contraction suffixes ``n't 's 'm 're 've 'll 'd`` off the
   remaining core;
4. downcase every resulting token.

Downcasing happens last so the contraction rules see the original casing.
The pipeline is idempotent: re-tokenizing ``" ".join(tokens)`` returns the
same tokens.
"""

from __future__ import annotations

_DETACHABLE = set('.,?!;:"()[]')
# Ordered longest-first so "n't" wins over "'t"-style overlaps.
_CONTRACTION_SUFFIXES = ("n't", "'re", "'ve", "'ll", "'s", "'m", "'d")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into lowercase tokens. Empty input yields ``[]``."""
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return [t.lower() for t in tokens]


def join_tokens(tokens: list[str]) -> str:
    """Inverse-ish of :func:`tokenize`: the canonical surface form of a span."""
    return " ".join(tokens)


def _split_chunk(chunk: str) -> list[str]:
    leading: list[str] = []
    trailing: list[str] = []
    while chunk and chunk[0] in _DETACHABLE:
        leading.append(chunk[0])
        chunk = chunk[1:]
    while chunk and chunk[-1] in _DETACHABLE:
        trailing.append(chunk[-1])
        chunk = chunk[:-1]
    trailing.reverse()
    core: list[str] = []
    if chunk:
        stem, suffix = _split_contraction(chunk)
        if suffix:
            # The stem may end in punctuation again ("u.s.'s"), or in a
            # further contraction ("they'd've"); recurse until stable.
            core = _split_chunk(stem) + [suffix]
        else:
            core = [chunk]
    return leading + core + trailing


def _split_contraction(word: str) -> tuple[str, str]:
    low = word.lower()
    for suffix in _CONTRACTION_SUFFIXES:
        # The stem must be non-empty, otherwise the word *is* the suffix.
        if low.endswith(suffix) and len(word) > len(suffix):
            cut = len(word) - len(suffix)
            return word[:cut], word[cut:]
    return word, ""
