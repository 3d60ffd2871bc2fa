"""Turn topic queries and rules into +/-1 labels, and drop circular columns.

A query set translates a topic into concrete phrases ("china",
"chinas", "chinese").  Count rules label a unit positive once the query
phrases occur often enough; the hard variant additionally drops units
whose relationship to the query is ambiguous.  Because the query
phrases would predict the labels trivially, their columns (and by
default every phrase sharing a token with them) are stripped from the
matrix before selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .corpus import Corpus, Document, DocumentUnit
from .errors import DegenerateLabelsError, EmptyMatrixError
from .tokenize import normalize_phrase
from .vectorize import CountMatrix

RULE_KINDS = ("count", "hcount", "metadata")


@dataclass(frozen=True)
class QuerySet:
    """A topic name, its query phrases, and phrases banned from summaries."""

    topic: str
    terms: tuple[str, ...]
    ban: tuple[str, ...] = ()

    def __post_init__(self):
        terms = tuple(dict.fromkeys(filter(None, (normalize_phrase(t) for t in self.terms))))
        ban = tuple(dict.fromkeys(filter(None, (normalize_phrase(t) for t in self.ban))))
        if not terms:
            raise ValueError("query set needs at least one non-empty term")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "ban", ban)

    def excluded_tokens(self) -> set[str]:
        """Every token that occurs inside a query or ban phrase."""
        tokens: set[str] = set()
        for phrase in self.terms + self.ban:
            tokens.update(phrase.split(" "))
        return tokens

    def to_dict(self) -> dict:
        return {"topic": self.topic, "terms": list(self.terms), "ban": list(self.ban)}

    @classmethod
    def from_dict(cls, payload: dict) -> "QuerySet":
        return cls(
            topic=payload.get("topic", ""),
            terms=tuple(payload.get("terms", ())),
            ban=tuple(payload.get("ban", ())),
        )


@dataclass(frozen=True)
class LabelingRule:
    """count: positive at >= k hits.  hcount: same, but 1..k-1 hits are dropped."""

    kind: str = "count"
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("count", "hcount"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("rule threshold k must be >= 1")

    def __str__(self) -> str:
        return f"{self.kind}:{self.k}"

    @classmethod
    def parse(cls, spec: str) -> "LabelingRule":
        kind, _, k = spec.partition(":")
        return cls(kind=kind.strip(), k=int(k) if k else 1)


class LabelVector:
    """Per-row labels in {-1, +1} with an optional set of dropped rows."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.int8)
        if not np.isin(values, (-1, 0, 1)).all():
            raise ValueError("label values must be -1, +1, or 0 (dropped)")
        self.values = values
        self.n_pos = int((values == 1).sum())
        self.n_neg = int((values == -1).sum())
        if self.n_pos == 0 or self.n_neg == 0:
            raise DegenerateLabelsError(
                f"degenerate labeling: {self.n_pos} positive and {self.n_neg} negative unit(s)"
            )

    @property
    def n_rows(self) -> int:
        return self.values.size

    @property
    def kept(self) -> np.ndarray:
        return np.flatnonzero(self.values != 0)

    @property
    def dropped(self) -> np.ndarray:
        return np.flatnonzero(self.values == 0)

    @property
    def y(self) -> np.ndarray:
        """Labels over the kept rows only, as float64."""
        return self.values[self.values != 0].astype(np.float64)

    def __repr__(self) -> str:
        return (
            f"LabelVector(n={self.n_rows}, pos={self.n_pos}, neg={self.n_neg}, "
            f"dropped={self.dropped.size})"
        )


def count_query_hits(counts: CountMatrix, query: QuerySet) -> np.ndarray:
    """Per-row total occurrences of the query terms.

    Terms absent from the vocabulary contribute zero hits.
    """
    hits = np.zeros(counts.n, dtype=np.int64)
    columns = [counts.vocab.column_of(t) for t in query.terms]
    columns = [j for j in columns if j is not None]
    if columns:
        hits += np.asarray(counts.matrix[:, columns].sum(axis=1)).ravel().astype(np.int64)
    return hits


def apply_rule(hits: np.ndarray, rule: LabelingRule) -> LabelVector:
    """Label rows from their query-hit counts."""
    hits = np.asarray(hits, dtype=np.int64)
    values = np.where(hits >= rule.k, 1, -1).astype(np.int8)
    if rule.kind == "hcount":
        values[(hits >= 1) & (hits <= rule.k - 1)] = 0
    return LabelVector(values)


def label_by_metadata(
    units: list[DocumentUnit],
    corpus: Corpus,
    predicate: Callable[[DocumentUnit, Document], bool],
) -> LabelVector:
    """+1 where the metadata predicate holds, -1 elsewhere; nothing dropped."""
    values = np.array(
        [1 if predicate(u, corpus.document(u.parent_id)) else -1 for u in units],
        dtype=np.int8,
    )
    return LabelVector(values)


def strip_query_columns(
    counts: CountMatrix, query: QuerySet, exact_only: bool = False
) -> tuple[CountMatrix, np.ndarray]:
    """Drop columns that would make the summary circular.

    By default a column goes if its phrase is a query/ban term or shares
    any token with one; with ``exact_only`` only exact phrase matches are
    removed.  Returns the reindexed matrix and the kept original column
    indices.
    """
    vocab = counts.vocab
    removed = np.zeros(counts.p, dtype=bool)
    exact = set(query.terms) | set(query.ban)
    for phrase in exact:
        j = vocab.column_of(phrase)
        if j is not None:
            removed[j] = True
    if not exact_only:
        banned_tokens = query.excluded_tokens()
        for j, phrase in enumerate(vocab.phrases):
            if not removed[j] and not banned_tokens.isdisjoint(phrase.split(" ")):
                removed[j] = True
    kept = np.flatnonzero(~removed)
    if kept.size == 0:
        raise EmptyMatrixError("stripping query columns removed every column")
    if kept.size == counts.p:
        return counts, kept
    return counts.select_columns(kept), kept
