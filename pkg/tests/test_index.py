import math
import random

import pytest

from kgqa.graph import KnowledgeGraph
from kgqa.index import InvertedIndex, extract_ngrams


def test_extract_ngrams_basic():
    assert extract_ngrams(["sasha", "vujacic"], 2) == [("sasha", "vujacic")]
    assert extract_ngrams(["a", "b", "c"], 1) == [("a",), ("b",), ("c",)]
    assert extract_ngrams(["a", "b"], 3) == []


def test_extract_ngrams_keeps_duplicates_in_order():
    assert extract_ngrams(["x", "y", "x", "y"], 2) == [
        ("x", "y"), ("y", "x"), ("x", "y")]


def test_extract_ngrams_rejects_bad_order():
    with pytest.raises(ValueError):
        extract_ngrams(["a"], 0)
    with pytest.raises(ValueError):
        extract_ngrams(["a"], 4)


def _kg(names):
    mids = sorted(names)
    triples = [(mid, "r", mids[0]) for mid in mids]
    return KnowledgeGraph.build(triples, names=[(m, n) for m, names_ in names.items()
                                                for n in names_])


def test_single_alias_postings():
    kg = _kg({"m.1": ["adam smith"]})
    index = InvertedIndex.build(kg)
    assert index.lookup(("adam",)) == [("m.1", 0)]
    assert index.lookup(("smith",)) == [("m.1", 0)]
    assert index.lookup(("adam", "smith")) == [("m.1", 0)]
    assert index.lookup(("missing",)) == []


def test_shared_alias_lists_both_mids():
    kg = _kg({"m.1": ["adam smith"], "m.2": ["adam smith"]})
    index = InvertedIndex.build(kg)
    assert index.lookup(("adam", "smith")) == [("m.1", 0), ("m.2", 0)]
    assert index.doc_freq(("adam", "smith")) == 2


def test_two_aliases_of_one_mid_distinct_indices():
    kg = _kg({"m.1": ["adam smith", "adam"]})
    index = InvertedIndex.build(kg)
    assert index.lookup(("adam",)) == [("m.1", 0), ("m.1", 1)]


def test_empty_graph_empty_index():
    index = InvertedIndex.build(KnowledgeGraph.build([]))
    assert len(index) == 0
    assert index.entry_count == 0
    assert index.lookup(("anything",)) == []


def test_idf_formula():
    kg = _kg({"m.1": ["a b"], "m.2": ["a c"]})
    index = InvertedIndex.build(kg)
    assert index.entry_count == 2
    assert index.idf(("a",)) == pytest.approx(math.log(1 + 2 / 2))
    assert index.idf(("b",)) == pytest.approx(math.log(1 + 2 / 1))
    assert index.idf(("zz",)) == 0.0


def _random_names(rng, n_entities):
    words = ["alpha", "beta", "gamma", "delta", "omega", "north", "south",
             "lake", "hill", "stone", "fox", "crow"]
    names = {}
    for i in range(n_entities):
        k = rng.randint(1, 4)
        variants = []
        for _ in range(rng.randint(1, 2)):
            variants.append(" ".join(rng.choice(words) for _ in range(k)))
        names[f"m.{i:03d}"] = variants
    return names


def test_completeness_and_soundness_against_brute_force():
    rng = random.Random(11)
    for _ in range(5):
        names = _random_names(rng, rng.randint(5, 60))
        kg = _kg(names)
        index = InvertedIndex.build(kg)
        # brute force: for every alias window, the posting must be present
        # (completeness), and every posting's alias must contain the gram
        # (soundness).
        for mid in sorted(names):
            for alias_idx, alias in enumerate(kg.aliases_of(mid)):
                for n in (1, 2, 3):
                    for gram in set(extract_ngrams(alias, n)):
                        assert (mid, alias_idx) in index.lookup(gram)
        for gram in index:
            for mid, alias_idx in index.lookup(gram):
                alias = kg.aliases_of(mid)[alias_idx]
                assert gram in set(extract_ngrams(alias, len(gram)))
            assert index.doc_freq(gram) == len(set(index.lookup(gram)))


def test_snapshot_round_trip_bit_exact(tmp_path):
    rng = random.Random(3)
    kg = _kg(_random_names(rng, 40))
    index = InvertedIndex.build(kg)
    first = tmp_path / "index1.txt"
    second = tmp_path / "index2.txt"
    index.save(str(first))
    loaded = InvertedIndex.load(str(first))
    loaded.save(str(second))
    assert first.read_bytes() == second.read_bytes()
    assert loaded.entry_count == index.entry_count
    assert len(loaded) == len(index)


def test_snapshot_rejects_foreign_header(tmp_path):
    path = tmp_path / "index.txt"
    path.write_text("something-else v9\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        InvertedIndex.load(str(path))
