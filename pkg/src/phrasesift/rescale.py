"""Count-to-feature rescaling: stop-word removal, unit-norm columns, tf-idf.

Frequent phrases have high variance and tend to get picked on noise, so
counts are reweighted before selection.  Three schemes are supported,
mirroring the usual trade-offs:

* ``stopword`` drops columns containing a listed word and keeps raw counts;
* ``l2`` divides each column by its Euclidean norm, so the more frequent
  a phrase the lower its weight;
* ``tfidf`` sets x = (c / row_total) * ln(n / doc_freq), de-emphasizing
  terms common across the corpus while adjusting for unit length.

A fourth token, ``raw``, passes counts through untouched (the baseline
the weighted schemes are compared against).  All transforms preserve
the sparsity pattern: a zero count never becomes a nonzero feature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator

from .errors import EmptyMatrixError
from .stopwords import DEFAULT_STOPWORDS
from .vectorize import CountMatrix, PhraseVocabulary

SCHEMES = ("raw", "stopword", "l2", "tfidf")


@dataclass
class FeatureMatrix:
    """Sparse real-valued feature matrix with a link back to its vocabulary.

    ``column_map[j]`` is the index of column j's phrase in ``vocab``;
    it is the identity unless the scheme dropped columns.
    """

    matrix: sp.csr_matrix
    vocab: PhraseVocabulary
    scheme: str
    column_map: np.ndarray

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=np.float64)
        self.matrix.eliminate_zeros()
        self.column_map = np.asarray(self.column_map, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def phrase(self, column: int) -> str:
        return self.vocab.phrases[self.column_map[column]]

    def phrases(self) -> list[str]:
        return [self.vocab.phrases[j] for j in self.column_map]


def as_features(counts: CountMatrix) -> FeatureMatrix:
    """Raw counts as features (no reweighting)."""
    return FeatureMatrix(
        counts.matrix.astype(np.float64),
        counts.vocab,
        "raw",
        np.arange(counts.p),
    )


def remove_stopwords(counts: CountMatrix, stoplist: Iterable[str]) -> FeatureMatrix:
    """Drop every column whose phrase contains a stop word; keep raw counts."""
    stopset = {w.lower() for w in stoplist}
    if not stopset:
        raise ValueError("stop list must be non-empty")
    kept = np.array(
        [stopset.isdisjoint(phrase.split(" ")) for phrase in counts.vocab.phrases],
        dtype=bool,
    )
    if not kept.any():
        raise EmptyMatrixError("stop-word removal dropped every column")
    columns = np.flatnonzero(kept)
    return FeatureMatrix(
        counts.matrix[:, columns].astype(np.float64),
        counts.vocab,
        "stopword",
        columns,
    )


def rescale_l2(counts: CountMatrix) -> FeatureMatrix:
    """Rescale each column to unit Euclidean norm; zero columns stay zero."""
    z = counts.col_sq_norms.astype(np.float64)
    inv_norm = np.zeros_like(z)
    nonzero = z > 0
    inv_norm[nonzero] = 1.0 / np.sqrt(z[nonzero])
    matrix = counts.matrix.astype(np.float64).tocsr(copy=True)
    matrix.data = matrix.data * inv_norm[matrix.indices]
    return FeatureMatrix(matrix, counts.vocab, "l2", np.arange(counts.p))


def rescale_tfidf(counts: CountMatrix) -> FeatureMatrix:
    """x = (c / row_total) * ln(n / doc_freq), doc_freq taken from the matrix.

    A phrase present in all n rows gets idf = ln(1) = 0 exactly, zeroing
    its column.
    """
    n = counts.n
    doc_freq = counts.document_frequencies().astype(np.float64)
    idf = np.zeros_like(doc_freq)
    present = doc_freq > 0
    idf[present] = np.log(n / doc_freq[present])
    matrix = counts.matrix.astype(np.float64).tocsr(copy=True)
    row_totals = counts.row_sums.astype(np.float64)
    row_lengths = np.diff(matrix.indptr)
    matrix.data = matrix.data / np.repeat(row_totals, row_lengths)
    matrix.data = matrix.data * idf[matrix.indices]
    return FeatureMatrix(matrix, counts.vocab, "tfidf", np.arange(counts.p))


def build_features(
    counts: CountMatrix, scheme: str, stoplist: Iterable[str] | None = None
) -> FeatureMatrix:
    """Dispatch on the scheme token used throughout configs and the CLI."""
    if scheme == "raw":
        return as_features(counts)
    if scheme == "stopword":
        return remove_stopwords(counts, DEFAULT_STOPWORDS if stoplist is None else stoplist)
    if scheme == "l2":
        return rescale_l2(counts)
    if scheme == "tfidf":
        return rescale_tfidf(counts)
    raise ValueError(f"unknown rescaling scheme {scheme!r}; expected one of {SCHEMES}")


class ColumnRescaler(BaseEstimator):
    """Transformer facade over the rescaling schemes (stateless)."""

    def __init__(self, scheme: str = "l2", stoplist: Iterable[str] | None = None):
        self.scheme = scheme
        self.stoplist = stoplist

    def fit(self, counts: CountMatrix, y=None) -> "ColumnRescaler":
        return self

    def transform(self, counts: CountMatrix) -> FeatureMatrix:
        return build_features(counts, self.scheme, self.stoplist)

    def fit_transform(self, counts: CountMatrix, y=None) -> FeatureMatrix:
        return self.transform(counts)
