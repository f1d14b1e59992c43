import random

import pytest

from kgqa.graph import KnowledgeGraph, load_knowledge_graph, normalize_mid, normalize_relation


def test_normalize_mid_variants():
    assert normalize_mid("www.freebase.com/m/0abc12") == "m.0abc12"
    assert normalize_mid("http://www.freebase.com/m/0abc12") == "m.0abc12"
    assert normalize_mid("/m/0abc12") == "m.0abc12"
    assert normalize_mid("m/0abc12") == "m.0abc12"
    assert normalize_mid("m.0abc12") == "m.0abc12"


def test_normalize_relation():
    assert normalize_relation("www.freebase.com/people/person/place_of_birth") == \
        "people/person/place_of_birth"
    assert normalize_relation("people/person/place_of_birth") == \
        "people/person/place_of_birth"


def test_subject_relations_and_in_degree():
    kg = KnowledgeGraph.build([("A", "r1", "B")])
    assert kg.relations_of("A") == {"r1"}
    assert kg.in_degree_of("B") == 1
    assert kg.in_degree_of("A") == 0


def test_in_degree_counts_each_incoming_edge():
    kg = KnowledgeGraph.build([("A", "r", "B"), ("C", "r", "B")])
    assert kg.in_degree_of("B") == 2


def test_empty_graph():
    kg = KnowledgeGraph.build([])
    assert kg.mids == set()
    assert kg.relations_of("A") == set()
    assert kg.in_degree_of("A") == 0
    assert not kg.has_wiki("A")
    assert kg.canonical_label("A") is None


def test_valid_pair():
    kg = KnowledgeGraph.build([("A", "r1", "B")])
    assert kg.valid_pair("A", "r1")
    assert not kg.valid_pair("A", "r2")
    assert not kg.valid_pair("missing", "r1")


def test_duplicate_triples_deduplicated():
    kg = KnowledgeGraph.build([("A", "r", "B"), ("A", "r", "B")])
    assert kg.in_degree_of("B") == 1
    assert kg.n_triples == 1
    assert kg.stats["duplicate_triples"] == 1


def test_in_degree_sums_to_triple_count():
    rng = random.Random(5)
    mids = [f"m.{i}" for i in range(30)]
    triples = {(rng.choice(mids), f"r{rng.randrange(4)}", rng.choice(mids))
               for _ in range(120)}
    kg = KnowledgeGraph.build(sorted(triples))
    assert sum(kg.in_degree_of(m) for m in kg.mids) == kg.n_triples == len(triples)
    # valid_pair against the brute-force definition
    for mid in mids:
        for rel in ("r0", "r1", "r2", "r3"):
            expected = any(s == mid and r == rel for s, r, _ in triples)
            assert kg.valid_pair(mid, rel) == expected


def test_first_alias_is_canonical_and_text_is_tokenized():
    kg = KnowledgeGraph.build(
        [("A", "r", "B")],
        names=[("A", "Adam Smith"), ("A", "Mr. Adam Smith"), ("B", "Glasgow")],
    )
    assert kg.canonical_label("A") == "adam smith"
    assert kg.aliases_of("A") == [("adam", "smith"), ("mr", ".", "adam", "smith")]


def test_unknown_and_duplicate_names_counted():
    kg = KnowledgeGraph.build(
        [("A", "r", "B")],
        names=[("A", "x"), ("A", "X"), ("nope", "ghost")],
        wiki_mids=["A", "ghost2"],
    )
    assert kg.stats["names_skipped_unknown"] == 1
    assert kg.stats["names_skipped_duplicate"] == 1
    assert kg.stats["wiki_skipped_unknown"] == 1
    assert kg.has_wiki("A")


def test_loader_and_malformed_line(tmp_path):
    triples = tmp_path / "t.tsv"
    triples.write_text("A\tr1\tB\nC\tr1\tB\n", encoding="utf-8")
    names = tmp_path / "n.tsv"
    names.write_text("A\tAlpha One\nB\tBeta\n", encoding="utf-8")
    wiki = tmp_path / "w.txt"
    wiki.write_text("B\n", encoding="utf-8")
    kg = load_knowledge_graph(str(triples), str(names), str(wiki))
    assert kg.in_degree_of("B") == 2
    assert kg.canonical_label("A") == "alpha one"
    assert kg.has_wiki("B")

    bad = tmp_path / "bad.tsv"
    bad.write_text("A\tr1\tB\nbroken line\n", encoding="utf-8")
    with pytest.raises(ValueError, match=r"bad\.tsv:2"):
        load_knowledge_graph(str(bad))
