import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synrank.errors import EmptyCorpus, FormatVersionMismatch, IncompatibleIndexes
from synrank.stats import StatsIndex, build_index, load_index, merge, save_index

from conftest import make_doc, make_sentence
from oracles import naive_counts, naive_slot_count, naive_slot_pair_count, random_corpus


def assert_matches_naive(index, docs, width=16):
    ref = naive_counts(docs, width)
    assert {t: [s.tf, s.noun_count, s.domain_tf, s.background_tf] for t, s in index.vocab.items()} == ref["vocab"]
    assert index.window.total_windows == ref["total_windows"]
    assert index.window.term_counts == ref["win_term"]
    assert index.window.pair_counts == ref["win_pair"]
    assert index.ngram.slots == ref["ngram_slots"]
    assert index.pos_ngram.slots == ref["pos_slots"]
    assert {t: dict(c) for t, c in index.dep.term_features.items()} == ref["dep_feats"]


class TestBuildIndex:
    def test_two_token_sentence(self):
        doc = make_doc("d", "domain", make_sentence("a", "b"))
        index = build_index([doc])
        assert index.window.total_windows == 2  # windows (a,b) and (b,)
        assert index.window.pair_count("a", "b") == 1
        assert index.window.count("a") == 1
        assert index.window.count("b") == 2

    def test_trigram_hole(self):
        doc = make_doc("d", "domain", make_sentence("a", "b", "c"))
        index = build_index([doc])
        assert index.ngram.slots[(1, "a", "c")] == {"b"}
        assert index.ngram.count("b") == 1

    def test_empty_stream(self):
        with pytest.raises(EmptyCorpus):
            build_index([])

    def test_repeated_term_counts_once_per_window(self):
        doc = make_doc("d", "domain", make_sentence("a", "a", "b"))
        index = build_index([doc])
        # windows: (a,a,b), (a,b), (b)
        assert index.window.count("a") == 2
        assert index.window.pair_count("a", "b") == 2

    def test_matches_naive_on_random_corpora(self):
        rng = random.Random(11)
        for _ in range(25):
            docs = random_corpus(rng, max_tokens=120)
            width = rng.choice((2, 3, 5, 16))
            assert_matches_naive(build_index(docs, width), docs, width)

    def test_order_independent(self):
        rng = random.Random(5)
        docs = random_corpus(rng, max_tokens=100)
        shuffled = docs[::-1]
        a = build_index(docs)
        b = build_index(shuffled)
        assert a.window == b.window and a.ngram == b.ngram and a.dep == b.dep


class TestPairBound:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 30))
    def test_pair_counts_bounded_by_marginals(self, seed):
        docs = random_corpus(random.Random(seed), max_tokens=80)
        index = build_index(docs)
        for (a, b), n in index.window.pair_counts.items():
            assert n <= min(index.window.count(a), index.window.count(b))
            assert index.window.count(a) <= index.window.total_windows

    def test_ngram_pair_symmetric_and_bounded(self):
        docs = random_corpus(random.Random(3), max_tokens=120)
        index = build_index(docs)
        terms = sorted(index.vocab)[:10]
        for a in terms:
            for b in terms:
                pc = index.ngram.pair_count(a, b)
                assert pc == index.ngram.pair_count(b, a)
                assert pc <= min(index.ngram.count(a), index.ngram.count(b))
                assert pc == naive_slot_pair_count(index.ngram.slots, a, b)
                assert index.ngram.count(a) == naive_slot_count(index.ngram.slots, a)

    def test_dep_mass_is_twice_edges(self):
        docs = random_corpus(random.Random(9), max_tokens=100)
        index = build_index(docs)
        edges = sum(
            1 for d in docs for s in d.sentences for t in s.tokens if t.head is not None
        )
        assert index.dep.total_mass == 2 * edges


class TestMerge:
    def test_merge_with_empty_is_identity(self):
        docs = random_corpus(random.Random(2), max_tokens=60)
        index = build_index(docs)
        merged = merge(index, StatsIndex.empty(16))
        assert merged.window == index.window
        assert merged.ngram == index.ngram
        assert merged.pos_ngram == index.pos_ngram
        assert merged.dep == index.dep

    def test_merge_equals_concatenated_build(self):
        rng = random.Random(13)
        for _ in range(10):
            docs_a = random_corpus(rng, max_tokens=60)
            docs_b = random_corpus(rng, max_tokens=60)
            ab = merge(build_index(docs_a), build_index(docs_b))
            ba = merge(build_index(docs_b), build_index(docs_a))
            full = build_index(docs_a + docs_b)
            for combined in (ab, ba):
                assert combined.window == full.window
                assert combined.ngram == full.ngram
                assert combined.pos_ngram == full.pos_ngram
                assert combined.dep == full.dep
                assert {t: vars(s) for t, s in combined.vocab.items()} == {
                    t: vars(s) for t, s in full.vocab.items()
                }

    def test_width_mismatch(self):
        with pytest.raises(IncompatibleIndexes):
            merge(StatsIndex.empty(8), StatsIndex.empty(16))


class TestSaveLoad:
    def test_roundtrip(self, tmp_path):
        docs = random_corpus(random.Random(21), max_tokens=120)
        index = build_index(docs)
        path = tmp_path / "stats.idx"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded.width == index.width
        assert loaded.has_pos == index.has_pos and loaded.has_deps == index.has_deps
        assert loaded.window == index.window
        assert loaded.ngram == index.ngram
        assert loaded.pos_ngram == index.pos_ngram
        assert loaded.dep == index.dep
        assert {t: vars(s) for t, s in loaded.vocab.items()} == {
            t: vars(s) for t, s in index.vocab.items()
        }

    def test_empty_index_roundtrip(self, tmp_path):
        path = tmp_path / "empty.idx"
        save_index(StatsIndex.empty(16), path)
        loaded = load_index(path)
        assert loaded.vocab == {} and loaded.window.total_windows == 0

    def test_truncated_file(self, tmp_path):
        docs = random_corpus(random.Random(1), max_tokens=50)
        path = tmp_path / "stats.idx"
        save_index(build_index(docs), path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises((FormatVersionMismatch, OSError)):
            load_index(path)

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "junk.idx"
        path.write_bytes(b"JUNKjunkjunk")
        with pytest.raises(FormatVersionMismatch):
            load_index(path)

    def test_byte_identical_saves(self, tmp_path):
        docs = random_corpus(random.Random(4), max_tokens=80)
        index = build_index(docs)
        p1, p2 = tmp_path / "a.idx", tmp_path / "b.idx"
        save_index(index, p1)
        save_index(index, p2)
        assert p1.read_bytes() == p2.read_bytes()
