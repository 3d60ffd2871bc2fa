import itertools

import numpy as np
import pytest

from phrasesift.errors import EmptyVocabularyError
from phrasesift.tokenize import tokenize
from phrasesift.vectorize import (
    PhraseVectorizer,
    build_count_matrix,
    build_vocabulary,
    load_count_matrix,
    save_count_matrix,
)


def brute_force_ngrams(texts, ngram_range):
    """Oracle: enumerate every n-gram per unit with plain itertools."""
    min_n, max_n = ngram_range
    doc_freq, total = {}, {}
    for text in texts:
        tokens = tokenize(text)
        grams = []
        for n in range(min_n, max_n + 1):
            for start in range(len(tokens) - n + 1):
                grams.append(" ".join(tokens[start : start + n]))
        for g in grams:
            total[g] = total.get(g, 0) + 1
        for g in set(grams):
            doc_freq[g] = doc_freq.get(g, 0) + 1
    return doc_freq, total


def sliding_count(text, phrase):
    """Oracle: count (possibly overlapping) phrase occurrences by scanning."""
    tokens = tokenize(text)
    target = tuple(phrase.split(" "))
    return sum(
        1
        for s in range(len(tokens) - len(target) + 1)
        if tuple(tokens[s : s + len(target)]) == target
    )


class TestBuildVocabulary:
    def test_exhaustive_tiny_case(self):
        vocab = build_vocabulary(["a b", "a b"], (1, 2), min_df=2)
        assert set(vocab.phrases) == {"a", "b", "a b"}
        assert all(df == 2 for df in vocab.doc_freq)

    def test_min_df_threshold_error(self):
        with pytest.raises(EmptyVocabularyError):
            build_vocabulary(["a b", "c"], (1, 1), min_df=2)

    def test_bigram_survives_trigram_does_not(self):
        texts = ["x y z", "x y w"]
        vocab = build_vocabulary(texts, (1, 3), min_df=2)
        doc_freq, _ = brute_force_ngrams(texts, (1, 3))
        expected = {g for g, df in doc_freq.items() if df >= 2}
        assert set(vocab.phrases) == expected
        assert "x y" in vocab
        assert not any(len(p.split()) == 3 for p in vocab.phrases)

    def test_statistics_match_brute_force(self):
        texts = [
            "the cat sat on the mat",
            "the cat ran",
            "a dog sat on the mat",
            "the mat sat",
        ]
        vocab = build_vocabulary(texts, (1, 3), min_df=2)
        doc_freq, total = brute_force_ngrams(texts, (1, 3))
        assert set(vocab.phrases) == {g for g, df in doc_freq.items() if df >= 2}
        for j, phrase in enumerate(vocab.phrases):
            assert vocab.doc_freq[j] == doc_freq[phrase]
            assert vocab.total_count[j] == total[phrase]

    def test_column_order_total_count_then_lexicographic(self):
        texts = ["b b a", "b a c", "c a"]
        vocab = build_vocabulary(texts, (1, 1), min_df=2)
        totals = [vocab.total_count[vocab.column_of(p)] for p in vocab.phrases]
        assert totals == sorted(totals, reverse=True)
        for left, right in itertools.pairwise(range(len(vocab))):
            if vocab.total_count[left] == vocab.total_count[right]:
                assert vocab.phrases[left] < vocab.phrases[right]

    def test_unigram_closure_under_min_df(self):
        texts = ["u v w q", "u v w r", "s t"]
        vocab = build_vocabulary(texts, (1, 3), min_df=2)
        for phrase in vocab.phrases:
            for token in phrase.split(" "):
                assert token in vocab, f"missing unigram {token!r} of {phrase!r}"

    def test_determinism(self):
        texts = ["alpha beta gamma"] * 3 + ["beta gamma delta"] * 2
        v1 = build_vocabulary(texts, (1, 2), 2)
        v2 = build_vocabulary(texts, (1, 2), 2)
        assert v1.phrases == v2.phrases
        assert np.array_equal(v1.doc_freq, v2.doc_freq)


class TestBuildCountMatrix:
    def test_overlapping_occurrences_counted(self):
        vocab = build_vocabulary(["a a a"], (1, 2), min_df=1)
        counts = build_count_matrix(["a a a"], vocab)
        j = vocab.column_of("a a")
        assert counts.matrix[0, j] == 2 == sliding_count("a a a", "a a")

    def test_hand_counted_example(self):
        vocab = build_vocabulary(["a b", "a"], (1, 2), min_df=1)
        counts = build_count_matrix(["a b", "a"], vocab)
        # column order: a (total 2), then "a b" and b (total 1 each, lexicographic)
        assert vocab.phrases == ["a", "a b", "b"]
        assert counts.matrix.toarray().tolist() == [[1, 1, 1], [1, 0, 0]]
        assert counts.col_sq_norms.tolist() == [2, 1, 1]
        assert counts.row_sums.tolist() == [3, 1]

    def test_unit_without_vocabulary_phrases_has_empty_row(self):
        vocab = build_vocabulary(["x x"], (1, 1), min_df=1)
        counts = build_count_matrix(["x x", "zzz qqq"], vocab)
        assert counts.row_sums.tolist() == [2, 0]
        assert counts.matrix[1].nnz == 0

    def test_counts_match_sliding_oracle(self):
        texts = [
            "oil and gas and oil",
            "gas gas gas",
            "solar and wind power",
            "oil prices and gas prices",
        ]
        vocab = build_vocabulary(texts, (1, 2), min_df=1)
        counts = build_count_matrix(texts, vocab)
        dense = counts.matrix.toarray()
        for i, text in enumerate(texts):
            for j, phrase in enumerate(vocab.phrases):
                assert dense[i, j] == sliding_count(text, phrase)

    def test_sums_recompute_exactly(self):
        texts = ["a b c a", "b c", "c c c a"]
        counts = build_count_matrix(texts, build_vocabulary(texts, (1, 2), 1))
        matrix = counts.matrix
        assert np.array_equal(
            counts.row_sums, np.asarray(matrix.sum(axis=1)).ravel()
        )
        squared = matrix.copy()
        squared.data = squared.data**2
        assert np.array_equal(
            counts.col_sq_norms, np.asarray(squared.sum(axis=0)).ravel()
        )
        assert counts.matrix.data.min() >= 1

    def test_select_rows_recomputes_statistics(self):
        texts = ["a a b", "b c", "a c c"]
        counts = build_count_matrix(texts, build_vocabulary(texts, (1, 1), 1))
        sub = counts.select_rows([0, 2])
        assert sub.n == 2
        assert np.array_equal(sub.row_sums, np.asarray(sub.matrix.sum(axis=1)).ravel())
        squared = sub.matrix.copy()
        squared.data = squared.data**2
        assert np.array_equal(sub.col_sq_norms, np.asarray(squared.sum(axis=0)).ravel())


class TestVectorizerEstimator:
    def test_fit_transform_and_params(self):
        vectorizer = PhraseVectorizer(ngram_range=(1, 2), min_df=1)
        assert vectorizer.get_params() == {"ngram_range": (1, 2), "min_df": 1}
        counts = vectorizer.fit_transform(["a b", "a c"])
        assert counts.shape[0] == 2
        assert "a" in vectorizer.vocabulary_

    def test_transform_before_fit_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            PhraseVectorizer().transform(["a"])

    def test_transform_on_new_units_uses_learned_vocabulary(self):
        vectorizer = PhraseVectorizer(ngram_range=(1, 1), min_df=1).fit(["a b", "b c"])
        counts = vectorizer.transform(["c c c unknown"])
        j = vectorizer.vocabulary_.column_of("c")
        assert counts.matrix[0, j] == 3
        assert counts.row_sums.tolist() == [3]


def test_cache_round_trip_is_bit_exact(tmp_path):
    texts = ["egypt cairo protest", "cairo quiet", "egypt egypt vote"]
    counts = build_count_matrix(texts, build_vocabulary(texts, (1, 2), 1))
    path = tmp_path / "cache.npz"
    save_count_matrix(path, counts)
    loaded = load_count_matrix(path)
    assert loaded.vocab.phrases == counts.vocab.phrases
    assert loaded.vocab.ngram_range == counts.vocab.ngram_range
    assert np.array_equal(loaded.vocab.doc_freq, counts.vocab.doc_freq)
    assert np.array_equal(loaded.vocab.total_count, counts.vocab.total_count)
    assert (loaded.matrix != counts.matrix).nnz == 0
    assert np.array_equal(loaded.row_sums, counts.row_sums)
    assert np.array_equal(loaded.col_sq_norms, counts.col_sq_norms)
