import numpy as np
import pytest

from semrel import bigram, vecmath
from semrel.bigram import (
    BigramRecord,
    build_bigram_corpus,
    cluster_words,
    parse_document,
    score_pair_unsupervised,
    train_embeddings,
    WordEmbeddingTable,
)
from semrel.corpus import TokenizedSentence
from semrel.errors import EmptyCorpus, EmptyRecords, KTooLarge

from oracles import brute_bigram_counts


def ts(*tokens):
    return TokenizedSentence(tokens)


def as_dict(records):
    return {(r.w1, r.w2): (r.sent_count, r.para_count, r.doc_count) for r in records}


class TestParseDocument:
    def test_paragraph_and_sentence_split(self):
        doc = "A cat sat. A dog ran!\n\nThe fish swam?"
        parsed = parse_document(doc)
        assert parsed == [
            [["a", "cat", "sat"], ["a", "dog", "ran"]],
            [["the", "fish", "swam"]],
        ]


class TestBuildBigramCorpus:
    def test_minimal_case(self):
        records = build_bigram_corpus(["a b"])
        assert records == [BigramRecord("a", "b", 1, 1, 1)]

    def test_hand_enumeration(self):
        records = as_dict(build_bigram_corpus(["a b. c a"]))
        assert records[("a", "b")] == (1, 1, 1)
        assert records[("a", "c")] == (1, 1, 1)
        assert records[("b", "c")] == (0, 1, 1)

    def test_cross_paragraph_pair(self):
        records = as_dict(build_bigram_corpus(["a b.\n\nc d."]))
        assert records[("a", "c")] == (0, 0, 1)
        assert records[("a", "b")] == (1, 1, 1)

    def test_matches_brute_force_on_random_corpora(self):
        rng = np.random.default_rng(0)
        vocab = list("abcdefgh")
        for _ in range(100):
            docs = []
            structured = []
            for _ in range(int(rng.integers(1, 4))):
                paragraphs = []
                for _ in range(int(rng.integers(1, 3))):
                    sentences = [
                        [str(t) for t in rng.choice(vocab, size=int(rng.integers(1, 8)))]
                        for _ in range(int(rng.integers(1, 4)))
                    ]
                    paragraphs.append(sentences)
                structured.append(paragraphs)
            docs = structured  # pre-parsed form is accepted directly
            got = as_dict(build_bigram_corpus(docs))
            expected = brute_bigram_counts(structured)
            assert got == expected
            for s, p, d in got.values():
                assert s <= p <= d

    def test_paragraph_reordering_preserves_doc_counts(self):
        doc = [[["a", "b"]], [["c", "d"]], [["a", "c"]]]
        swapped = [doc[2], doc[0], doc[1]]
        before = as_dict(build_bigram_corpus([doc]))
        after = as_dict(build_bigram_corpus([swapped]))
        assert {k: v[2] for k, v in before.items()} == {k: v[2] for k, v in after.items()}

    def test_sentence_reordering_preserves_para_counts(self):
        doc = [[["a", "b"], ["b", "c"], ["d"]]]
        swapped = [[["d"], ["b", "c"], ["a", "b"]]]
        before = as_dict(build_bigram_corpus([doc]))
        after = as_dict(build_bigram_corpus([swapped]))
        assert {k: v[1] for k, v in before.items()} == {k: v[1] for k, v in after.items()}

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_bigram_corpus([])
        with pytest.raises(EmptyCorpus):
            build_bigram_corpus(["..."])


class TestTrainEmbeddings:
    def _records(self):
        # (a,b) strongly connected; z only ever co-occurs with c
        return [
            BigramRecord("a", "b", 8, 8, 8),
            BigramRecord("b", "c", 1, 1, 2),
            BigramRecord("c", "z", 1, 1, 1),
        ]

    def test_separability(self):
        table = train_embeddings(self._records(), epochs=200, lr=0.1, dim=16, seed=0)
        va = vecmath.SentenceEmbedding("a", table.vectors["a"])
        vb = vecmath.SentenceEmbedding("b", table.vectors["b"])
        vz = vecmath.SentenceEmbedding("z", table.vectors["z"])
        assert vecmath.cosine(va, vb) > vecmath.cosine(va, vz)

    def test_negative_ratio_exactly_one_to_one(self):
        table = train_embeddings(self._records(), epochs=7, seed=1)
        assert table.n_positive_draws == table.n_negative_draws
        assert table.n_positive_draws == 7 * 3

    def test_deterministic(self):
        t1 = train_embeddings(self._records(), epochs=3, seed=5)
        t2 = train_embeddings(self._records(), epochs=3, seed=5)
        assert t1.vectors.keys() == t2.vectors.keys()
        for term in t1.vectors:
            assert np.array_equal(t1.vectors[term], t2.vectors[term])

    def test_empty_records(self):
        with pytest.raises(EmptyRecords):
            train_embeddings([])

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            train_embeddings(self._records(), weights=(0.0, 0.0, 0.0))


class TestClusterWords:
    def _table(self, vectors):
        return WordEmbeddingTable(len(next(iter(vectors.values()))), {
            k: np.asarray(v, dtype=float) for k, v in vectors.items()
        }, seed=0)

    def test_extreme_k(self):
        table = self._table({"a": [1, 0], "b": [0, 1], "c": [1, 1]})
        assert cluster_words(table, 3) == {"a": 1, "b": 2, "c": 3}
        assert set(cluster_words(table, 1).values()) == {1}

    def test_two_separated_groups(self):
        table = self._table({
            "a": [1.0, 0.01], "b": [1.0, -0.01], "c": [0.99, 0.0],
            "x": [-0.01, 1.0], "y": [0.01, 1.0],
        })
        got = cluster_words(table, 2)
        assert got["a"] == got["b"] == got["c"]
        assert got["x"] == got["y"]
        assert got["a"] != got["x"]

    def test_k_too_large(self):
        table = self._table({"a": [1, 0], "b": [0, 1]})
        with pytest.raises(KTooLarge):
            cluster_words(table, 3)
        with pytest.raises(KTooLarge):
            cluster_words(table, 0)


class TestScorePair:
    def _table(self):
        return WordEmbeddingTable(2, {
            "cat": np.array([1.0, 0.0]),
            "dog": np.array([0.0, 1.0]),
            "fish": np.array([1.0, 1.0]),
        }, seed=0)

    def test_identical_known_sentences(self):
        table = self._table()
        assert score_pair_unsupervised(ts("cat", "dog"), ts("cat", "dog"), table) == 1.0

    def test_alpha_zero_is_jaccard(self):
        table = self._table()
        a, b = ts("cat", "dog"), ts("cat", "fish")
        from semrel.lexical import jaccard
        assert score_pair_unsupervised(a, b, table, alpha=0.0) == jaccard(a, b).value

    def test_hand_blend(self):
        table = self._table()
        a, b = ts("cat"), ts("dog")
        # cosine of unit axes is 0 -> cos01 = 0.5; jaccard = 0
        assert score_pair_unsupervised(a, b, table, alpha=0.5) == pytest.approx(
            0.5 * 0.5, abs=1e-12
        )

    def test_unknown_words_fall_back_to_jaccard(self):
        table = self._table()
        a, b = ts("zebra", "lion"), ts("zebra")
        assert score_pair_unsupervised(a, b, table) == pytest.approx(0.5)

    def test_symmetric_and_bounded(self):
        table = self._table()
        rng = np.random.default_rng(2)
        words = ["cat", "dog", "fish", "zebra"]
        for _ in range(20):
            a = ts(*rng.choice(words, size=2))
            b = ts(*rng.choice(words, size=2))
            s1 = score_pair_unsupervised(a, b, table, 0.7)
            s2 = score_pair_unsupervised(b, a, table, 0.7)
            assert s1 == pytest.approx(s2, abs=1e-15)
            assert 0.0 <= s1 <= 1.0


def test_records_tsv_round_trip(tmp_path):
    records = build_bigram_corpus(["a b. c a", "b c"])
    path = tmp_path / "r.tsv"
    bigram.write_records_tsv(records, path)
    assert bigram.read_records_tsv(path) == records


def test_table_semb_round_trip(tmp_path):
    table = train_embeddings([BigramRecord("a", "b", 1, 1, 1)], epochs=2, dim=8, seed=3)
    path = tmp_path / "t.semb"
    bigram.write_table(table, path)
    back = bigram.read_table(path)
    assert set(back.vectors) == {"a", "b"}
    assert np.allclose(back.vectors["a"], table.vectors["a"], atol=1e-6)
