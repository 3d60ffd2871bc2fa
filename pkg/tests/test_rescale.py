import math

import numpy as np
import pytest
import scipy.sparse as sp

from phrasesift.errors import EmptyMatrixError
from phrasesift.rescale import (
    ColumnRescaler,
    as_features,
    build_features,
    remove_stopwords,
    rescale_l2,
    rescale_tfidf,
)
from phrasesift.stopwords import DEFAULT_STOPWORDS
from phrasesift.vectorize import CountMatrix, build_count_matrix, build_vocabulary


def matrix_of(texts, ngram_range=(1, 2), min_df=1):
    return build_count_matrix(texts, build_vocabulary(texts, ngram_range, min_df))


def counts_from_array(array):
    array = np.asarray(array)
    phrases = [f"p{j}" for j in range(array.shape[1])]
    vocab = build_vocabulary(phrases, (1, 1), 1)
    vocab.phrases = phrases  # fixed column names for direct construction
    vocab.index = {p: j for j, p in enumerate(phrases)}
    vocab.doc_freq = (array > 0).sum(axis=0).astype(np.int64)
    vocab.total_count = array.sum(axis=0).astype(np.int64)
    return CountMatrix(sp.csr_matrix(array), vocab)


class TestL2:
    def test_single_column_forced_values(self):
        counts = counts_from_array([[3], [4], [0]])
        feats = rescale_l2(counts)
        assert np.allclose(feats.matrix.toarray().ravel(), [0.6, 0.8, 0.0])

    def test_column_of_ones(self):
        counts = counts_from_array([[1], [1], [1], [1]])
        feats = rescale_l2(counts)
        assert np.allclose(feats.matrix.toarray().ravel(), 0.5)

    def test_random_matrix_unit_norms(self):
        rng = np.random.default_rng(7)
        array = rng.integers(0, 4, size=(5, 3))
        array[:, 2] = 0  # force a zero column
        feats = rescale_l2(counts_from_array(array))
        dense = feats.matrix.toarray()
        norms = np.linalg.norm(dense, axis=0)
        for j in range(3):
            if array[:, j].any():
                assert abs(norms[j] - 1.0) <= 1e-12
            else:
                assert norms[j] == 0.0


class TestTfIdf:
    def test_term_in_every_unit_zeroes_out(self):
        counts = matrix_of(["the cat", "the dog"], (1, 1))
        feats = rescale_tfidf(counts)
        j = counts.vocab.column_of("the")
        assert np.all(feats.matrix.toarray()[:, j] == 0.0)

    def test_hand_evaluated_entry(self):
        # row 0 of "x x y y": c=2, q=4, d=1, n=2 -> 0.5 * ln 2
        counts = matrix_of(["x x y y", "z w"], (1, 1))
        feats = rescale_tfidf(counts)
        j = counts.vocab.column_of("x")
        assert feats.matrix[0, j] == pytest.approx(0.5 * math.log(2), abs=1e-12)

    def test_doubling_counts_leaves_values_unchanged(self):
        counts = matrix_of(["a a b", "b c", "a c c"], (1, 1))
        doubled_matrix = counts.matrix.copy()
        doubled_matrix.data = doubled_matrix.data * 2
        doubled = CountMatrix(doubled_matrix, counts.vocab)
        original = rescale_tfidf(counts).matrix.toarray()
        scaled = rescale_tfidf(doubled).matrix.toarray()
        assert np.allclose(original, scaled, atol=1e-15)

    def test_matches_scalar_formula(self):
        counts = matrix_of(["egypt cairo cairo", "egypt vote", "quiet day"], (1, 1))
        feats = rescale_tfidf(counts)
        dense = feats.matrix.toarray()
        n = counts.n
        doc_freq = counts.document_frequencies()
        raw = counts.matrix.toarray()
        for i in range(counts.n):
            for j in range(counts.p):
                if raw[i, j]:
                    expected = (raw[i, j] / counts.row_sums[i]) * math.log(n / doc_freq[j])
                    assert dense[i, j] == pytest.approx(expected, abs=1e-14)
                else:
                    assert dense[i, j] == 0.0


class TestStopwords:
    def test_phrase_containing_stop_word_dropped(self):
        counts = matrix_of(["and afghanistan war", "afghanistan war grew"], (1, 2))
        feats = remove_stopwords(counts, DEFAULT_STOPWORDS)
        kept = set(feats.phrases())
        assert "afghanistan" in kept
        assert "and afghanistan" not in kept
        assert "and" not in kept

    def test_function_words_eliminated(self):
        texts = ["and by for of trade", "trade and exports by sea"]
        counts = matrix_of(texts, (1, 1))
        feats = remove_stopwords(counts, DEFAULT_STOPWORDS)
        kept = set(feats.phrases())
        for word in ("and", "by", "for", "of"):
            assert word not in kept
        assert {"trade", "exports", "sea"} <= kept

    def test_disjoint_stoplist_keeps_raw_counts(self):
        counts = matrix_of(["oil gas", "gas coal"], (1, 1))
        feats = remove_stopwords(counts, {"zzz"})
        assert np.array_equal(feats.matrix.toarray(), counts.matrix.toarray())

    def test_empty_stoplist_rejected(self):
        counts = matrix_of(["a b"], (1, 1))
        with pytest.raises(ValueError):
            remove_stopwords(counts, set())

    def test_all_columns_dropped_is_an_error(self):
        counts = matrix_of(["and the", "the and"], (1, 1))
        with pytest.raises(EmptyMatrixError):
            remove_stopwords(counts, {"and", "the"})


class TestSchemeDispatch:
    def test_pattern_preserved_by_all_schemes(self):
        texts = ["egypt cairo cairo", "egypt vote", "quiet day today"]
        counts = matrix_of(texts, (1, 1))
        raw = counts.matrix.toarray()
        for scheme in ("raw", "l2", "tfidf", "stopword"):
            feats = build_features(counts, scheme)
            dense = feats.matrix.toarray()
            source = raw[:, feats.column_map]
            assert np.all(dense[source == 0] == 0.0), scheme

    def test_raw_scheme_is_identity(self):
        counts = matrix_of(["a b b", "b c"], (1, 1))
        feats = as_features(counts)
        assert np.array_equal(feats.matrix.toarray(), counts.matrix.toarray())

    def test_unknown_scheme_rejected(self):
        counts = matrix_of(["a b"], (1, 1))
        with pytest.raises(ValueError):
            build_features(counts, "bm25")

    def test_rescaler_estimator(self):
        counts = matrix_of(["a b b", "b c"], (1, 1))
        rescaler = ColumnRescaler(scheme="l2")
        assert rescaler.get_params()["scheme"] == "l2"
        feats = rescaler.fit_transform(counts)
        assert feats.scheme == "l2"

    def test_determinism(self):
        counts = matrix_of(["a b b", "b c", "c a a"], (1, 1))
        one = build_features(counts, "tfidf").matrix.toarray()
        two = build_features(counts, "tfidf").matrix.toarray()
        assert np.array_equal(one, two)
