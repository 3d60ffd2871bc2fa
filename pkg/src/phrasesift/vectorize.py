"""Phrase vocabulary construction and the sparse unit-by-phrase count matrix.

Every contiguous token n-gram inside the configured length range that
appears in at least ``min_df`` units becomes a column.  Counts include
overlapping occurrences.  Construction is deterministic: columns are
ordered by descending corpus-wide count, ties broken lexicographically,
so the same units and parameters always yield the identical matrix.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import EmptyVocabularyError
from .tokenize import tokenize


def _unit_text(unit) -> str:
    return unit if isinstance(unit, str) else unit.text


@dataclass
class PhraseVocabulary:
    """Ordered phrase list with its inverse index and corpus statistics.

    ``doc_freq`` and ``total_count`` describe the unit sequence the
    vocabulary was built from; row-subset matrices keep the vocabulary
    but derive any per-subset statistics from their own entries.
    """

    phrases: list[str]
    ngram_range: tuple[int, int]
    doc_freq: np.ndarray
    total_count: np.ndarray
    min_df: int = 1
    index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {phrase: j for j, phrase in enumerate(self.phrases)}

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return phrase in self.index

    def column_of(self, phrase: str) -> int | None:
        return self.index.get(phrase)

    def tokens_of(self, column: int) -> tuple[str, ...]:
        return tuple(self.phrases[column].split(" "))

    def subset(self, columns: np.ndarray) -> "PhraseVocabulary":
        """New vocabulary restricted to ``columns`` (original order kept)."""
        columns = np.asarray(columns, dtype=np.int64)
        return PhraseVocabulary(
            phrases=[self.phrases[j] for j in columns],
            ngram_range=self.ngram_range,
            doc_freq=self.doc_freq[columns].copy(),
            total_count=self.total_count[columns].copy(),
            min_df=self.min_df,
        )


@dataclass
class CountMatrix:
    """Sparse nonnegative-integer unit-by-phrase matrix with row/column sums.

    ``row_sums[i]`` is the total phrase mass of unit i and
    ``col_sq_norms[j]`` the sum of squared counts of column j; both are
    kept exactly consistent with the stored entries (zeros are never
    stored).
    """

    matrix: sp.csr_matrix
    vocab: PhraseVocabulary
    row_sums: np.ndarray = None
    col_sq_norms: np.ndarray = None

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)
        self.matrix.eliminate_zeros()
        if self.row_sums is None:
            self.row_sums = np.asarray(self.matrix.sum(axis=1)).ravel().astype(np.int64)
        if self.col_sq_norms is None:
            squared = self.matrix.copy()
            squared.data = squared.data**2
            self.col_sq_norms = np.asarray(squared.sum(axis=0)).ravel().astype(np.int64)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def document_frequencies(self) -> np.ndarray:
        """Per-column count of rows with a nonzero entry, from stored entries."""
        return np.diff(self.matrix.tocsc().indptr).astype(np.int64)

    def select_rows(self, rows: Sequence[int] | np.ndarray) -> "CountMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return CountMatrix(self.matrix[rows], self.vocab)

    def select_columns(self, columns: np.ndarray) -> "CountMatrix":
        columns = np.asarray(columns, dtype=np.int64)
        return CountMatrix(self.matrix[:, columns], self.vocab.subset(columns))


def build_vocabulary(
    units: Sequence, ngram_range: tuple[int, int] = (1, 3), min_df: int = 2
) -> PhraseVocabulary:
    """Collect every n-gram appearing in at least ``min_df`` units."""
    min_n, max_n = ngram_range
    if not (1 <= min_n <= max_n):
        raise ValueError(f"invalid ngram_range {ngram_range!r}")
    if min_df < 1:
        raise ValueError("min_df must be a positive integer")
    if not units:
        raise ValueError("cannot build a vocabulary from an empty unit sequence")

    doc_freq: Counter = Counter()
    total: Counter = Counter()
    for unit in units:
        tokens = tokenize(_unit_text(unit))
        seen: set[str] = set()
        for n in range(min_n, max_n + 1):
            if n == 1:
                grams = tokens
            else:
                grams = [" ".join(tokens[s : s + n]) for s in range(len(tokens) - n + 1)]
            total.update(grams)
            seen.update(grams)
        doc_freq.update(seen)

    kept = [g for g, df in doc_freq.items() if df >= min_df]
    if not kept:
        raise EmptyVocabularyError(
            f"empty vocabulary: no phrase appears in at least {min_df} unit(s)"
        )
    kept.sort(key=lambda g: (-total[g], g))
    return PhraseVocabulary(
        phrases=kept,
        ngram_range=(min_n, max_n),
        doc_freq=np.array([doc_freq[g] for g in kept], dtype=np.int64),
        total_count=np.array([total[g] for g in kept], dtype=np.int64),
        min_df=min_df,
    )


def build_count_matrix(units: Sequence, vocab: PhraseVocabulary) -> CountMatrix:
    """Count occurrences of every vocabulary phrase in every unit.

    Occurrences are contiguous token subsequences and may overlap
    ("a a a" contains "a a" twice).
    """
    min_n, max_n = vocab.ngram_range
    index = vocab.index
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for unit in units:
        tokens = tokenize(_unit_text(unit))
        counts: dict[int, int] = {}
        for n in range(min_n, max_n + 1):
            for s in range(len(tokens) - n + 1):
                gram = tokens[s] if n == 1 else " ".join(tokens[s : s + n])
                j = index.get(gram)
                if j is not None:
                    counts[j] = counts.get(j, 0) + 1
        indices.extend(counts.keys())
        data.extend(counts.values())
        indptr.append(len(indices))
    matrix = sp.csr_matrix(
        (
            np.asarray(data, dtype=np.int64),
            np.asarray(indices, dtype=np.int64),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(units), len(vocab)),
    )
    matrix.sort_indices()
    return CountMatrix(matrix, vocab)


class PhraseVectorizer(BaseEstimator):
    """Estimator facade over vocabulary construction and counting.

    ``fit`` learns the vocabulary from a sequence of texts or units;
    ``transform`` counts vocabulary phrases in (possibly different)
    texts, so it composes with pipeline-style tooling.
    """

    def __init__(self, ngram_range: tuple[int, int] = (1, 3), min_df: int = 2):
        self.ngram_range = ngram_range
        self.min_df = min_df

    def fit(self, units: Sequence, y=None) -> "PhraseVectorizer":
        self.vocabulary_ = build_vocabulary(units, self.ngram_range, self.min_df)
        return self

    def transform(self, units: Sequence) -> CountMatrix:
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError("PhraseVectorizer must be fitted before transform")
        return build_count_matrix(units, self.vocabulary_)

    def fit_transform(self, units: Sequence, y=None) -> CountMatrix:
        return self.fit(units).transform(units)


def units_fingerprint(units: Sequence, ngram_range: tuple[int, int], min_df: int) -> str:
    """Content hash of a unit sequence plus construction parameters."""
    digest = hashlib.sha256()
    digest.update(json.dumps({"ngram_range": list(ngram_range), "min_df": min_df}).encode())
    for unit in units:
        uid = unit.unit_id if hasattr(unit, "unit_id") else ""
        digest.update(uid.encode("utf-8"))
        digest.update(b"\x1f")
        digest.update(_unit_text(unit).encode("utf-8"))
        digest.update(b"\x1e")
    return digest.hexdigest()


def save_count_matrix(path: str | Path, counts: CountMatrix) -> None:
    """Persist a (vocabulary, matrix) pair; the round trip is bit-exact."""
    vocab = counts.vocab
    np.savez_compressed(
        path,
        indptr=counts.matrix.indptr,
        indices=counts.matrix.indices,
        data=counts.matrix.data,
        shape=np.asarray(counts.matrix.shape, dtype=np.int64),
        row_sums=counts.row_sums,
        col_sq_norms=counts.col_sq_norms,
        phrases=np.asarray(vocab.phrases, dtype=np.str_),
        doc_freq=vocab.doc_freq,
        total_count=vocab.total_count,
        ngram_range=np.asarray(vocab.ngram_range, dtype=np.int64),
        min_df=np.asarray([vocab.min_df], dtype=np.int64),
    )


def load_count_matrix(path: str | Path) -> CountMatrix:
    with np.load(path, allow_pickle=False) as archive:
        matrix = sp.csr_matrix(
            (archive["data"], archive["indices"], archive["indptr"]),
            shape=tuple(archive["shape"]),
        )
        vocab = PhraseVocabulary(
            phrases=[str(p) for p in archive["phrases"]],
            ngram_range=tuple(int(v) for v in archive["ngram_range"]),
            doc_freq=archive["doc_freq"].copy(),
            total_count=archive["total_count"].copy(),
            min_df=int(archive["min_df"][0]),
        )
        return CountMatrix(
            matrix, vocab, archive["row_sums"].copy(), archive["col_sq_norms"].copy()
        )
