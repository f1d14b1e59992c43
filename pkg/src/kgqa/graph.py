"""Knowledge graph subset: triples, entity names, and popularity signals.

The graph is loaded once from three plain-text sources (triples, names,
Wikipedia mapping) and is immutable afterwards.  Only the views the rest of
the pipeline needs are retained:

* ``subject -> set of relations`` for validity pruning,
* per-entity in-degree (number of incoming edges) as a popularity proxy,
* per-entity alias list (tokenized; the first name seen is the canonical
  label used for edit-distance ranking),
* the set of entities with a Wikipedia mapping.

Raw ``(subject, relation, object)`` triples are not kept after loading;
answering needs only the (entity, relation) pair, never the object value.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable

from .text import tokenize

log = logging.getLogger(__name__)

_URL_PREFIXES = ("http://", "https://")
_FREEBASE_HOST = "www.freebase.com"


def normalize_mid(raw: str) -> str:
    """Canonicalize an entity identifier to the ``m.xxxx`` form.

    Accepts ``www.freebase.com/m/0abc12``, ``/m/0abc12``, ``m/0abc12`` and
    ``m.0abc12`` alike; one canonical key prevents silent join failures
    between differently-formatted source files.
    """
    s = raw.strip()
    for prefix in _URL_PREFIXES:
        if s.startswith(prefix):
            s = s[len(prefix):]
            break
    if s.startswith(_FREEBASE_HOST):
        s = s[len(_FREEBASE_HOST):]
    s = s.lstrip("/")
    return s.replace("/", ".")


def normalize_relation(raw: str) -> str:
    """Strip URL prefixes from a relation, keeping its slash-separated path."""
    s = raw.strip()
    for prefix in _URL_PREFIXES:
        if s.startswith(prefix):
            s = s[len(prefix):]
            break
    if s.startswith(_FREEBASE_HOST):
        s = s[len(_FREEBASE_HOST):]
    return s.strip("/")


class KnowledgeGraph:
    """Immutable triple-store views plus alias and popularity lookups.

    Build with :meth:`build` (in-memory sources, mostly for tests) or
    :func:`load_knowledge_graph` (files).  All MIDs and relations are
    normalized and alias text is tokenized on the way in.
    """

    def __init__(
        self,
        subject_relations: dict[str, set[str]],
        in_degree: dict[str, int],
        aliases: dict[str, list[tuple[str, ...]]],
        wiki: set[str],
        n_triples: int,
        stats: dict[str, int] | None = None,
    ):
        self._subject_relations = subject_relations
        self._in_degree = in_degree
        self._aliases = aliases
        self._wiki = wiki
        self.n_triples = n_triples
        self.stats = dict(stats or {})

    @classmethod
    def build(
        cls,
        triples: Iterable[tuple[str, str, str]],
        names: Iterable[tuple[str, str]] = (),
        wiki_mids: Iterable[str] = (),
    ) -> "KnowledgeGraph":
        """Assemble a graph from raw (possibly unnormalized) records."""
        seen: set[tuple[str, str, str]] = set()
        duplicates = 0
        subject_relations: dict[str, set[str]] = {}
        in_degree: dict[str, int] = {}
        for s, r, o in triples:
            triple = (normalize_mid(s), normalize_relation(r), normalize_mid(o))
            if not all(triple):
                raise ValueError(f"triple with empty field: {(s, r, o)!r}")
            if triple in seen:
                duplicates += 1
                continue
            seen.add(triple)
            subj, rel, obj = triple
            subject_relations.setdefault(subj, set()).add(rel)
            in_degree[obj] = in_degree.get(obj, 0) + 1
            in_degree.setdefault(subj, 0)

        mids = set(in_degree)
        stats = {
            "duplicate_triples": duplicates,
            "names_loaded": 0,
            "names_skipped_unknown": 0,
            "names_skipped_empty": 0,
            "names_skipped_duplicate": 0,
            "wiki_loaded": 0,
            "wiki_skipped_unknown": 0,
        }

        aliases: dict[str, list[tuple[str, ...]]] = {}
        alias_seen: set[tuple[str, tuple[str, ...]]] = set()
        for raw_mid, name in names:
            mid = normalize_mid(raw_mid)
            if mid not in mids:
                stats["names_skipped_unknown"] += 1
                continue
            tokens = tuple(tokenize(name))
            if not tokens:
                stats["names_skipped_empty"] += 1
                continue
            if (mid, tokens) in alias_seen:
                stats["names_skipped_duplicate"] += 1
                continue
            alias_seen.add((mid, tokens))
            aliases.setdefault(mid, []).append(tokens)
            stats["names_loaded"] += 1

        wiki: set[str] = set()
        for raw_mid in wiki_mids:
            mid = normalize_mid(raw_mid)
            if mid not in mids:
                stats["wiki_skipped_unknown"] += 1
                continue
            wiki.add(mid)
            stats["wiki_loaded"] += 1

        for key in ("names_skipped_unknown", "wiki_skipped_unknown"):
            if stats[key]:
                log.warning("%d %s entries refer to MIDs outside the graph", stats[key], key.split("_")[0])

        return cls(subject_relations, in_degree, aliases, wiki, len(seen), stats)

    # -- queries -------------------------------------------------------

    @property
    def mids(self) -> set[str]:
        """Every entity appearing in a triple (as subject or object)."""
        return set(self._in_degree)

    def relations_of(self, mid: str) -> set[str]:
        return self._subject_relations.get(mid, set())

    def valid_pair(self, mid: str, relation: str) -> bool:
        """True iff at least one triple (mid, relation, _) exists."""
        return relation in self._subject_relations.get(mid, ())

    def in_degree_of(self, mid: str) -> int:
        return self._in_degree.get(mid, 0)

    def has_wiki(self, mid: str) -> bool:
        return mid in self._wiki

    def aliases_of(self, mid: str) -> list[tuple[str, ...]]:
        return self._aliases.get(mid, [])

    def canonical_label(self, mid: str) -> str | None:
        """Space-joined first alias, or None when the entity has no name."""
        entries = self._aliases.get(mid)
        return " ".join(entries[0]) if entries else None

    def mids_with_aliases(self) -> list[str]:
        return sorted(self._aliases)

    def all_relations(self) -> set[str]:
        out: set[str] = set()
        for rels in self._subject_relations.values():
            out.update(rels)
        return out

    def __contains__(self, mid: str) -> bool:
        return mid in self._in_degree

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"KnowledgeGraph(entities={len(self._in_degree)}, "
            f"triples={self.n_triples}, named={len(self._aliases)})"
        )


def _read_tsv(path: str, n_fields: int):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != n_fields:
                raise ValueError(
                    f"{path}:{lineno}: expected {n_fields} tab-separated fields, got {len(fields)}"
                )
            yield fields


def load_knowledge_graph(triples_path: str, names_path: str | None = None,
                         wiki_path: str | None = None) -> KnowledgeGraph:
    """Load a graph from TSV sources.

    * triples: ``subject<TAB>relation<TAB>object``, one per line;
    * names: ``mid<TAB>name``, multiple lines per MID allowed (first wins
      as the canonical label);
    * wiki: one MID per line.

    Raises ValueError with the file name and line number on malformed lines.
    """
    triples = ((s, r, o) for s, r, o in _read_tsv(triples_path, 3))
    names: Iterable[tuple[str, str]] = ()
    if names_path:
        names = ((mid, name) for mid, name in _read_tsv(names_path, 2))
    wiki: Iterable[str] = ()
    if wiki_path:
        wiki = (row[0] for row in _read_tsv(wiki_path, 1))
    return KnowledgeGraph.build(triples, names, wiki)
