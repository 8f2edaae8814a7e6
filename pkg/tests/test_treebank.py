import json
import random

import pytest

from ddparse.errors import EmptyCorpus, ParseError, ValidationError
from ddparse.treebank import (
    Arc,
    COARSE_RELATIONS,
    FINE_RELATIONS,
    ROOT_RELATION,
    build_tree,
    corpus_stats,
    dumps_document,
    is_projective,
    load_corpus,
    load_document,
    save_corpus,
    to_coarse,
    validate_tree,
)

from util import make_edu, projective_by_crossing, random_valid_tree, tree_from_heads


def test_relation_inventory_sizes():
    assert len(FINE_RELATIONS) == 26
    assert len(COARSE_RELATIONS) == 17
    for rel in ("elab-addition", "joint", "enablement", "bg-general", "evaluation"):
        assert rel in FINE_RELATIONS
    assert FINE_RELATIONS[0] == ROOT_RELATION
    assert COARSE_RELATIONS[0] == ROOT_RELATION


def test_every_fine_relation_maps_to_a_coarse_class():
    assert {to_coarse(r) for r in FINE_RELATIONS} == set(COARSE_RELATIONS)
    assert to_coarse("elab-addition") == "elaboration"
    assert to_coarse("ROOT") == ROOT_RELATION


def test_build_tree_prepends_artificial_root():
    tree = tree_from_heads([0])
    assert tree.edus[0].id == 0
    assert tree.edus[0].text == ""
    assert tree.k == 1


def test_validate_tree_accepts_valid_tree():
    tree = tree_from_heads([2, 0, 2])  # arcs 0->2, 2->1, 2->3
    assert validate_tree(tree) == []


def test_validate_tree_multiple_heads_or_cycle():
    edus = [make_edu(1), make_edu(2)]
    tree = build_tree("d", edus, [Arc(0, 1), Arc(1, 2), Arc(2, 1)])
    violations = validate_tree(tree)
    assert any(v.startswith(("multiple-heads(1)", "cycle")) for v in violations)


def test_validate_tree_headless():
    edus = [make_edu(1), make_edu(2), make_edu(3)]
    tree = build_tree("d", edus, [Arc(0, 1), Arc(1, 2)])
    assert "headless(3)" in validate_tree(tree)


def test_validate_tree_root_as_dependent_and_self_head():
    edus = [make_edu(1), make_edu(2)]
    tree = build_tree("d", edus, [Arc(1, 0), Arc(2, 2)])
    violations = validate_tree(tree)
    assert "root-as-dependent(0)" in violations
    assert "self-head(2)" in violations


def test_arc_count_equals_real_edu_count_for_valid_trees():
    rng = random.Random(7)
    for _ in range(50):
        tree = random_valid_tree(rng.randint(1, 9), rng)
        assert validate_tree(tree) == []
        assert len(tree.arcs) == tree.k


def test_is_projective_nested():
    assert is_projective(tree_from_heads([2, 0, 2]))  # {0->2, 2->1, 2->3}


def test_is_projective_right_chain_with_inner_arc():
    # arcs {0->1, 1->3, 3->2}: all pairs pass the crossing test
    tree = tree_from_heads([0, 3, 1])
    assert projective_by_crossing(tree)
    assert is_projective(tree)


def test_is_projective_detects_crossing():
    # arcs {0->2, 2->4, 4->1, 1->3}: 4->1 crosses 0->2, and 1->3 crosses 2->4
    tree = tree_from_heads([4, 0, 1, 2])
    assert not projective_by_crossing(tree)
    assert not is_projective(tree)


def test_is_projective_agrees_with_crossing_oracle():
    rng = random.Random(42)
    for _ in range(1000):
        tree = random_valid_tree(rng.randint(1, 10), rng, single_root=False)
        assert is_projective(tree) == projective_by_crossing(tree)


# ---------------------------------------------------------------------------
# Corpus file format


def _write_doc(directory, tree):
    path = directory / f"{tree.doc_id}.json"
    path.write_text(dumps_document(tree), encoding="utf-8")
    return path


def test_load_corpus_fixture_roundtrip(tmp_path):
    gold = tree_from_heads([2, 0, 2], doc_id="fix1",
                           relations=["elab-addition", ROOT_RELATION, "joint"])
    _write_doc(tmp_path, gold)
    corpus = load_corpus(tmp_path)
    assert len(corpus) == 1
    assert corpus[0].k == 3
    assert corpus[0] == gold


def test_save_corpus_byte_identical_roundtrip(tmp_path):
    docs = [
        tree_from_heads([0, 1], doc_id="a"),
        tree_from_heads([2, 0, 2, 3], doc_id="b"),
    ]
    first = tmp_path / "first"
    second = tmp_path / "second"
    save_corpus(docs, first)
    save_corpus(load_corpus(first), second)
    for name in ("a.json", "b.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_load_corpus_order_is_lexicographic(tmp_path):
    for doc_id in ("zebra", "alpha", "middle"):
        _write_doc(tmp_path, tree_from_heads([0], doc_id=doc_id))
    assert [t.doc_id for t in load_corpus(tmp_path)] == ["alpha", "middle", "zebra"]


def test_load_document_self_head_rejected(tmp_path):
    record = {
        "doc_id": "bad",
        "edus": [
            {"id": 1, "text": "a", "parent": 1, "relation": "joint",
             "sentence": 0, "ends_with_period": True},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(ValidationError):
        load_document(path)


def test_load_document_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_document(path)


def test_load_document_missing_field(tmp_path):
    record = {"doc_id": "x", "edus": [{"id": 1, "text": "a"}]}
    path = tmp_path / "x.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(ParseError):
        load_document(path)


def test_load_document_unknown_relation(tmp_path):
    record = {
        "doc_id": "x",
        "edus": [
            {"id": 1, "text": "a", "parent": 0, "relation": "not-a-relation",
             "sentence": 0, "ends_with_period": True},
        ],
    }
    path = tmp_path / "x.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(ValidationError):
        load_document(path)


def test_load_document_unannotated_is_allowed(tmp_path):
    record = {
        "doc_id": "x",
        "edus": [
            {"id": 1, "text": "a", "parent": -1, "relation": "",
             "sentence": 0, "ends_with_period": False},
            {"id": 2, "text": "b", "parent": -1, "relation": "",
             "sentence": 0, "ends_with_period": True},
        ],
    }
    path = tmp_path / "x.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    tree = load_document(path)
    assert tree.k == 2
    assert tree.arcs == ()


def test_non_projective_tree_loads_as_valid(tmp_path):
    tree = tree_from_heads([4, 0, 1, 2], doc_id="np")
    _write_doc(tmp_path, tree)
    loaded = load_corpus(tmp_path)[0]
    assert validate_tree(loaded) == []
    assert not is_projective(loaded)


# ---------------------------------------------------------------------------
# Corpus statistics


def test_corpus_stats_single_edu_doc():
    stats = corpus_stats([tree_from_heads([0])])
    assert stats.n_edus == 2  # includes the artificial root
    assert stats.n_relations == 1
    assert stats.avg_edus_per_doc == 1.0


def test_corpus_stats_average_over_docs():
    corpus = [tree_from_heads([0, 1]), tree_from_heads([0, 1, 2, 3])]
    stats = corpus_stats(corpus)
    assert stats.avg_edus_per_doc == 3.0
    assert stats.n_relations == stats.n_edus - stats.n_docs


def test_corpus_stats_percentages_sum_to_100():
    rng = random.Random(3)
    corpus = [
        random_valid_tree(rng.randint(1, 12), rng, random_relations=True,
                          doc_id=f"d{i}")
        for i in range(25)
    ]
    stats = corpus_stats(corpus)
    assert abs(sum(pct for _, _, pct in stats.relation_freq) - 100.0) < 0.01
    counts = [count for _, count, _ in stats.relation_freq]
    assert counts == sorted(counts, reverse=True)


def test_corpus_stats_chars_exclude_padding():
    tree = tree_from_heads([0], texts=["  四个字呀  "])
    assert corpus_stats([tree]).avg_chars_per_edu == 4.0


def test_corpus_stats_empty_corpus():
    with pytest.raises(EmptyCorpus):
        corpus_stats([])
