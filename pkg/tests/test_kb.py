import numpy as np
import pytest

from proofsmith import EmptyKBError, InvalidInputError, build_index, cluster_keywords, \
    extract_keywords, retrieve, retrieve_for_pair
from proofsmith.kb import load_cached_index
from reference_impls import topk_bruteforce


def test_build_index_counts_and_dedup(tmp_path, oracle):
    path = tmp_path / "kb.txt"
    path.write_text("a dog is an animal\nan oak is a tree\na dog is an animal\n")
    index = build_index([path], oracle)
    assert len(index) == 2
    assert [f.text for f in index.facts] == ["a dog is an animal", "an oak is a tree"]


def test_build_index_union_across_files(tmp_path, oracle, kb_tsv_file):
    plain = tmp_path / "extra.txt"
    plain.write_text("a guitar is an instrument\na ball is a toy\n")
    index = build_index([kb_tsv_file, plain], oracle)
    # the TSV copy of the guitar fact wins; the plain duplicate is dropped
    assert len(index) == 4
    guitar = [f for f in index.facts if "guitar" in f.text][0]
    assert guitar.kb_id == "omcs-0001" and guitar.source == "OMCS"
    ball = [f for f in index.facts if "ball" in f.text][0]
    assert ball.source == "other" and ball.kb_id.startswith("extra-")


def test_build_index_errors(tmp_path, oracle):
    with pytest.raises(FileNotFoundError):
        build_index([tmp_path / "missing.txt"], oracle)
    empty = tmp_path / "empty.txt"
    empty.write_text("# only a comment\n\n")
    with pytest.raises(EmptyKBError):
        build_index([empty], oracle)


def test_index_rows_unit_norm_and_immutable(kb_file, oracle):
    index = build_index([kb_file], oracle)
    assert np.allclose(np.linalg.norm(index.embeddings, axis=1), 1.0, atol=1e-6)
    with pytest.raises(ValueError):
        index.embeddings[0, 0] = 5.0


def test_build_index_deterministic(kb_file, oracle):
    a = build_index([kb_file], oracle)
    b = build_index([kb_file], oracle)
    assert [f.kb_id for f in a.facts] == [f.kb_id for f in b.facts]
    assert np.array_equal(a.embeddings, b.embeddings)


def test_cache_roundtrip(tmp_path, kb_file, oracle):
    cache = tmp_path / "kb.kbi"
    first = build_index([kb_file], oracle, cache_path=cache)
    assert cache.is_file()

    class CountingEmbedder:
        backend_id = oracle.backend_id

        def __init__(self):
            self.calls = 0

        def embed(self, texts):
            self.calls += 1
            return oracle.embed(texts)

    counting = CountingEmbedder()
    second = build_index([kb_file], counting, cache_path=cache)
    assert counting.calls == 0  # embeddings came from the cache
    assert np.array_equal(first.embeddings, second.embeddings)

    loaded = load_cached_index(cache)
    assert [f.text for f in loaded.facts] == [f.text for f in first.facts]
    assert np.array_equal(loaded.embeddings, first.embeddings)


def test_cache_invalidated_on_changed_embedder(tmp_path, kb_file, oracle):
    cache = tmp_path / "kb.kbi"
    build_index([kb_file], oracle, cache_path=cache)

    class OtherEmbedder:
        backend_id = "other-embedder"

        def __init__(self):
            self.calls = 0

        def embed(self, texts):
            self.calls += 1
            return oracle.embed(texts)

    other = OtherEmbedder()
    build_index([kb_file], other, cache_path=cache)
    assert other.calls == 1  # stale key -> re-embedded


def test_extract_keywords(oracle, tagger):
    n_p, n_h = extract_keywords("a dog chases a ball", "an animal plays", tagger)
    assert n_p == ["dog", "ball"]
    assert n_h == ["animal"]
    n_p, _ = extract_keywords("is of the", "a dog", tagger)
    assert n_p == []
    n_p, _ = extract_keywords("a dog sees a dog", "a cat", tagger)
    assert n_p == ["dog"]


def test_cluster_keywords_cases(oracle):
    single = cluster_keywords(["dog"], oracle)
    assert single.groups == (("dog",),)

    grouped = cluster_keywords(["dog", "animal", "lantern"], oracle, threshold=0.45)
    assert ("dog", "animal") in grouped.groups
    assert ("lantern",) in grouped.groups

    # fig-style grouping from the bundled lexicon's related classes
    groups = cluster_keywords(["dog", "animal", "snow", "cold", "frisbee", "toy", "plastic"],
                              oracle, threshold=0.45)
    assert ("dog", "animal") in groups.groups
    assert ("snow", "cold") in groups.groups
    assert ("frisbee", "toy", "plastic") in groups.groups


def test_cluster_partitions_input(oracle):
    tokens = ["dog", "snow", "guitar", "cold", "animal", "harbor", "frisbee"]
    groups = cluster_keywords(tokens, oracle)
    flattened = [tok for group in groups.groups for tok in group]
    assert sorted(flattened) == sorted(tokens)


def test_cluster_all_orthogonal(oracle):
    tokens = ["lantern", "quartz", "harbor"]
    groups = cluster_keywords(tokens, oracle)
    assert groups.groups == (("lantern",), ("quartz",), ("harbor",))


def test_retrieve_matches_bruteforce(kb_file, oracle):
    index = build_index([kb_file], oracle)
    for query in ["a guitar is an instrument", "dog animal", "toy plastic frisbee"]:
        query_vec = np.asarray(oracle.embed([query]))[0]
        for k in (1, 3, len(index), len(index) + 5):
            got = retrieve(index, query, k, oracle)
            want = topk_bruteforce(index, query_vec, k)
            assert [(f.kb_id, pytest.approx(f.score, abs=1e-9)) for f in got] == \
                [(kb_id, pytest.approx(score, abs=1e-9)) for kb_id, score in want]
            assert [f.rank for f in got] == list(range(1, len(got) + 1))
            scores = [f.score for f in got]
            assert scores == sorted(scores, reverse=True)


def test_retrieve_matches_bruteforce_large_random_kb(tmp_path, oracle):
    import random

    rng = random.Random(31)
    words = ["dog", "cat", "animal", "tree", "snow", "cold", "guitar", "toy",
             "stone", "river", "cloud", "glass", "wheel", "door", "lamp"]
    lines = {" ".join(rng.choices(words, k=rng.randint(3, 7))) for _ in range(400)}
    path = tmp_path / "big.txt"
    path.write_text("\n".join(sorted(lines)) + "\n", encoding="utf-8")
    index = build_index([path], oracle)
    assert 200 <= len(index) <= 1000
    for query in ["dog snow", "guitar", "stone river cloud"]:
        query_vec = np.asarray(oracle.embed([query]))[0]
        got = retrieve(index, query, 25, oracle)
        want = topk_bruteforce(index, query_vec, 25)
        assert [(f.kb_id, f.score) for f in got] == want


def test_retrieve_identity_query_ranks_first(kb_file, oracle):
    index = build_index([kb_file], oracle)
    hits = retrieve(index, "a frisbee is a toy", 3, oracle)
    assert hits[0].text == "a frisbee is a toy"
    assert hits[0].score == pytest.approx(1.0)


def test_retrieve_k_zero_rejected(kb_file, oracle):
    index = build_index([kb_file], oracle)
    with pytest.raises(InvalidInputError):
        retrieve(index, "a dog", 0, oracle)


def test_retrieve_for_pair_merges_and_ranks(kb_file, oracle, tagger):
    index = build_index([kb_file], oracle)
    facts = retrieve_for_pair(index, "a woman plays a guitar",
                              "a person plays an instrument", 4, oracle, tagger)
    assert len(facts) == 4
    assert facts[0].text == "a guitar is an instrument"
    assert [f.rank for f in facts] == [1, 2, 3, 4]
    scores = [f.score for f in facts]
    assert scores == sorted(scores, reverse=True)


def test_retrieve_for_pair_single_group_equals_plain_query(kb_file, oracle, tagger):
    # both keywords cluster together, so strategy B degenerates to strategy A
    index = build_index([kb_file], oracle)
    merged = retrieve_for_pair(index, "a dog sleeps", "an animal sleeps", 5, oracle, tagger)
    direct = retrieve(index, "dog animal", 5, oracle)
    assert [f.kb_id for f in merged] == [f.kb_id for f in direct]


def test_retrieve_for_pair_fallback_without_nouns(kb_file, oracle, tagger):
    index = build_index([kb_file], oracle)
    merged = retrieve_for_pair(index, "is of the", "was with", 3, oracle, tagger)
    direct = retrieve(index, "is of the", 3, oracle)
    assert [f.kb_id for f in merged] == [f.kb_id for f in direct]
