"""End-to-end workflows: time-window snapshot series, source comparisons,
near-duplicate reporting, phrase-in-context sampling, and a synthetic
corpus generator with known ground truth for verification.

A snapshot series runs the full chain (filter, label, strip, rescale,
select) once per named time window.  By default the vocabulary and
count matrix are built once over all units so columns stay comparable
across windows; per-window rebuilds are available by flag.  Windows are
independent jobs over the shared immutable matrix and can run on a
small thread pool; results keep window order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, Document, DocumentUnit, filter_source, parse_timestamp, segment
from .errors import PhraseSiftError
from .labeling import LabelVector, LabelingRule, QuerySet, apply_rule, count_query_hits, strip_query_columns
from .rescale import build_features
from .select import SelectorConfig, Summary, summarize
from .tokenize import tokenize, tokenize_spans
from .vectorize import CountMatrix, build_count_matrix, build_vocabulary

DEFAULT_MIN_DF = {"article": 2, "paragraph": 3, "headline": 2}


@dataclass(frozen=True)
class Window:
    name: str
    start: datetime
    end: datetime

    @classmethod
    def of(cls, name: str, start, end) -> "Window":
        return cls(name, parse_timestamp(start), parse_timestamp(end))


@dataclass
class SnapshotSpec:
    """Everything needed to run one summary per time window."""

    query: QuerySet
    windows: list[Window]
    rule: LabelingRule = field(default_factory=LabelingRule)
    unit_kind: str = "article"
    scheme: str = "l2"
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    ngram_range: tuple[int, int] = (1, 3)
    min_df: int | None = None
    global_vocabulary: bool = True

    def to_dict(self) -> dict:
        return {
            "query": self.query.to_dict(),
            "windows": [
                {"name": w.name, "start": w.start.isoformat(), "end": w.end.isoformat()}
                for w in self.windows
            ],
            "rule": {"kind": self.rule.kind, "k": self.rule.k},
            "unit_kind": self.unit_kind,
            "scheme": self.scheme,
            "selector": self.selector.to_dict(),
            "ngram_range": list(self.ngram_range),
            "min_df": self.min_df,
            "global_vocabulary": self.global_vocabulary,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SnapshotSpec":
        return cls(
            query=QuerySet.from_dict(payload["query"]),
            windows=[Window.of(w["name"], w["start"], w["end"]) for w in payload["windows"]],
            rule=LabelingRule(**payload.get("rule", {"kind": "count", "k": 1})),
            unit_kind=payload.get("unit_kind", "article"),
            scheme=payload.get("scheme", "l2"),
            selector=SelectorConfig.from_dict(payload.get("selector", {})),
            ngram_range=tuple(payload.get("ngram_range", (1, 3))),
            min_df=payload.get("min_df"),
            global_vocabulary=payload.get("global_vocabulary", True),
        )


@dataclass
class SnapshotResult:
    """One window's summary plus the volume statistics behind it."""

    window: Window
    summary: Summary | None
    n_units: int
    n_positive: int
    positives_per_week: float
    positive_share: float
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "window": {
                "name": self.window.name,
                "start": self.window.start.isoformat(),
                "end": self.window.end.isoformat(),
            },
            "summary": self.summary.to_dict() if self.summary else None,
            "n_units": self.n_units,
            "n_positive": self.n_positive,
            "positives_per_week": self.positives_per_week,
            "positive_share": self.positive_share,
            "error": self.error,
        }


def _resolve_min_df(spec_min_df: int | None, unit_kind: str) -> int:
    return spec_min_df if spec_min_df is not None else DEFAULT_MIN_DF[unit_kind]


def build_matrix(
    units: Sequence[DocumentUnit],
    ngram_range: tuple[int, int] = (1, 3),
    min_df: int | None = None,
    unit_kind: str = "article",
) -> CountMatrix:
    vocab = build_vocabulary(units, ngram_range, _resolve_min_df(min_df, unit_kind))
    return build_count_matrix(units, vocab)


def run_summary(
    counts: CountMatrix,
    query: QuerySet,
    rule: LabelingRule,
    scheme: str,
    selector: SelectorConfig,
    unit_kind: str | None = None,
    stoplist: Iterable[str] | None = None,
) -> Summary:
    """Label from raw counts, strip circular columns, rescale, select."""
    hits = count_query_hits(counts, query)
    labels = apply_rule(hits, rule)
    stripped, _ = strip_query_columns(counts, query)
    feats = build_features(stripped, scheme, stoplist)
    return summarize(
        feats,
        labels,
        selector,
        topic=query.topic,
        scheme=scheme,
        rule=str(rule),
        unit_kind=unit_kind,
    )


def snapshot_series(
    corpus: Corpus,
    spec: SnapshotSpec,
    stoplist: Iterable[str] | None = None,
    n_workers: int = 1,
) -> list[SnapshotResult]:
    """One summary per window; degenerate windows carry an error marker."""
    units = segment(corpus, spec.unit_kind)
    published = []
    for unit in units:
        ts = corpus.document(unit.parent_id).published_at
        if ts is None:
            raise PhraseSiftError(f"document {unit.parent_id!r} has no published_at; cannot window")
        published.append(ts)

    min_df = _resolve_min_df(spec.min_df, spec.unit_kind)
    global_counts = None
    if spec.global_vocabulary:
        vocab = build_vocabulary(units, spec.ngram_range, min_df)
        global_counts = build_count_matrix(units, vocab)

    def run_window(window: Window) -> SnapshotResult:
        rows = [i for i, ts in enumerate(published) if window.start <= ts < window.end]
        days = (window.end - window.start) / timedelta(days=1)
        if not rows:
            return SnapshotResult(window, None, 0, 0, 0.0, 0.0, error="window contains no units")
        try:
            if global_counts is not None:
                counts = global_counts.select_rows(np.asarray(rows))
            else:
                counts = build_matrix([units[i] for i in rows], spec.ngram_range, min_df, spec.unit_kind)
        except PhraseSiftError as exc:
            return SnapshotResult(window, None, len(rows), 0, 0.0, 0.0, error=str(exc))
        hits = count_query_hits(counts, spec.query)
        n_pos = int((hits >= spec.rule.k).sum())
        weekly = n_pos / (days / 7.0)
        share = n_pos / len(rows)
        try:
            labels = apply_rule(hits, spec.rule)
            stripped, _ = strip_query_columns(counts, spec.query)
            feats = build_features(stripped, spec.scheme, stoplist)
            summary = summarize(
                feats,
                labels,
                spec.selector,
                topic=spec.query.topic,
                scheme=spec.scheme,
                rule=str(spec.rule),
                unit_kind=spec.unit_kind,
            )
            return SnapshotResult(window, summary, len(rows), n_pos, weekly, share)
        except PhraseSiftError as exc:
            return SnapshotResult(window, None, len(rows), n_pos, weekly, share, error=str(exc))

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(run_window, spec.windows))
    return [run_window(w) for w in spec.windows]


def snapshot_grid_csv(results: Sequence[SnapshotResult]) -> str:
    """CSV grid: one row per phrase, one column per window, cells are ranks."""
    import csv
    import io

    columns = [r.window.name for r in results]
    ranks: dict[str, dict[str, int]] = {}
    for result in results:
        if result.summary is None:
            continue
        for rank, (phrase, _) in enumerate(result.summary.phrases, start=1):
            ranks.setdefault(phrase, {})[result.window.name] = rank
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["phrase", *columns])
    for phrase in sorted(ranks):
        row = [phrase] + [ranks[phrase].get(c, "") for c in columns]
        writer.writerow(row)
    return buffer.getvalue()


@dataclass
class ComparisonSpec:
    """Between-source (A vs B) or within-source (topic vs rest) comparison."""

    mode: str
    source_a: str | None = None
    source_b: str | None = None
    query: QuerySet | None = None
    rule: LabelingRule = field(default_factory=LabelingRule)
    unit_kind: str = "headline"
    scheme: str = "l2"
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    ngram_range: tuple[int, int] = (1, 3)
    min_df: int | None = None

    def __post_init__(self):
        if self.mode not in ("between_source", "within_source"):
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        if self.mode == "between_source":
            if not self.source_a or not self.source_b or self.source_a == self.source_b:
                raise ValueError("between_source comparison needs two distinct source tags")
        else:
            if not self.source_a:
                raise ValueError("within_source comparison needs a source tag")
            if self.query is None:
                raise ValueError("within_source comparison needs a query set")


def compare_between(
    corpus: Corpus, spec: ComparisonSpec, stoplist: Iterable[str] | None = None
) -> Summary:
    """Label one source positive, the other negative, optionally keeping
    only units that mention the topic at all."""
    units = segment(corpus, spec.unit_kind)
    units = [
        u
        for u in units
        if corpus.document(u.parent_id).source in (spec.source_a, spec.source_b)
    ]
    if not units:
        raise PhraseSiftError("no units from either source")
    min_df = _resolve_min_df(spec.min_df, spec.unit_kind)
    counts = build_matrix(units, spec.ngram_range, min_df, spec.unit_kind)

    banned = None
    if spec.query is not None:
        hits = count_query_hits(counts, spec.query)
        rows = np.flatnonzero(hits >= 1)
        if rows.size == 0:
            raise PhraseSiftError("topic filter removed every unit")
        units = [units[i] for i in rows]
        counts = counts.select_rows(rows)
        if spec.query.ban:
            banned = QuerySet(topic=spec.query.topic, terms=spec.query.ban)

    sources = np.array([corpus.document(u.parent_id).source for u in units])
    if spec.source_a not in sources or spec.source_b not in sources:
        raise PhraseSiftError("a source has no units left after filtering")
    values = np.where(sources == spec.source_a, 1, -1).astype(np.int8)
    labels = LabelVector(values)
    # Labels come from source tags, not the query, so query terms stay;
    # only explicitly banned phrases are stripped.
    if banned is not None:
        counts, _ = strip_query_columns(counts, banned)
    feats = build_features(counts, spec.scheme, stoplist)
    return summarize(
        feats,
        labels,
        spec.selector,
        topic=f"{spec.source_a} vs {spec.source_b}"
        + (f" ({spec.query.topic})" if spec.query else ""),
        scheme=spec.scheme,
        rule=f"source:{spec.source_a}",
        unit_kind=spec.unit_kind,
    )


def compare_within(
    corpus: Corpus, spec: ComparisonSpec, stoplist: Iterable[str] | None = None
) -> Summary:
    """Inside one source, label on-topic units against the rest."""
    units = segment(corpus, spec.unit_kind)
    units = filter_source(units, corpus, spec.source_a)
    if not units:
        raise PhraseSiftError(f"source {spec.source_a!r} has no units")
    min_df = _resolve_min_df(spec.min_df, spec.unit_kind)
    counts = build_matrix(units, spec.ngram_range, min_df, spec.unit_kind)
    summary = run_summary(
        counts, spec.query, spec.rule, spec.scheme, spec.selector, spec.unit_kind, stoplist
    )
    summary.topic = f"{spec.query.topic} within {spec.source_a}"
    return summary


def near_duplicates(
    counts: CountMatrix, threshold: float = 0.95, block_size: int = 2048
) -> list[tuple[int, int, float]]:
    """All unordered row pairs with cosine similarity >= threshold.

    Computed on raw count rows; zero rows never match.  Exact blocked
    comparison, adequate below ~50k rows.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must be in (0, 1]")
    matrix = counts.matrix.astype(np.float64).tocsr()
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    inv = np.zeros_like(norms)
    nonzero = norms > 0
    inv[nonzero] = 1.0 / norms[nonzero]
    normalized = sp.diags(inv) @ matrix
    pairs: list[tuple[int, int, float]] = []
    n = matrix.shape[0]
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        sims = (normalized[start:stop] @ normalized.T).tocoo()
        for i, j, value in zip(sims.row + start, sims.col, sims.data):
            if j > i and value >= threshold:
                pairs.append((int(i), int(j), float(min(value, 1.0))))
    pairs.sort(key=lambda t: (-t[2], t[0], t[1]))
    return pairs


@dataclass
class Snippet:
    """A phrase occurrence in its original surrounding text."""

    unit_id: str
    text: str
    match_start: int
    match_end: int

    def highlighted(self) -> str:
        return (
            self.text[: self.match_start]
            + self.text[self.match_start : self.match_end].upper()
            + self.text[self.match_end :]
        )


def kwic(
    units: Sequence[DocumentUnit],
    phrase: str,
    max_samples: int = 10,
    window_tokens: int = 8,
    seed: int = 0,
) -> list[Snippet]:
    """Sample occurrences of a phrase with surrounding context.

    Occurrences are gathered across all units and sampled uniformly
    without replacement with a seeded generator; each snippet shows the
    original (unnormalized) text with the match span marked.
    """
    target = tuple(tokenize(phrase))
    if not target:
        raise ValueError("phrase is empty after tokenization")
    occurrences: list[tuple[int, int]] = []
    spans_by_unit: dict[int, list[tuple[str, int, int]]] = {}
    for u_idx, unit in enumerate(units):
        spans = tokenize_spans(unit.text)
        tokens = tuple(t for t, _, _ in spans)
        if len(tokens) < len(target):
            continue
        found = [
            s
            for s in range(len(tokens) - len(target) + 1)
            if tokens[s : s + len(target)] == target
        ]
        if found:
            spans_by_unit[u_idx] = spans
            occurrences.extend((u_idx, s) for s in found)
    if not occurrences:
        return []
    rng = np.random.default_rng(seed)
    take = min(max_samples, len(occurrences))
    chosen = rng.choice(len(occurrences), size=take, replace=False)
    snippets = []
    for idx in sorted(int(c) for c in chosen):
        u_idx, s = occurrences[idx]
        spans = spans_by_unit[u_idx]
        lo = max(0, s - window_tokens)
        hi = min(len(spans), s + len(target) + window_tokens)
        text_start = spans[lo][1]
        text_end = spans[hi - 1][2]
        match_start = spans[s][1]
        match_end = spans[s + len(target) - 1][2]
        snippets.append(
            Snippet(
                unit_id=units[u_idx].unit_id,
                text=units[u_idx].text[text_start:text_end],
                match_start=match_start - text_start,
                match_end=match_end - text_start,
            )
        )
    return snippets


@dataclass
class PlantedTruth:
    """Ground truth of a generated corpus: what a selector should find."""

    planted: list[str]
    query_token: str
    positive_ids: list[str]

    def recovered(self, summary: Summary) -> int:
        found = set()
        for phrase, _ in summary.phrases:
            found.update(phrase.split(" "))
        return len(found & set(self.planted))


def synthetic_corpus(
    n_units: int = 2000,
    vocab_size: int = 5000,
    n_planted: int = 10,
    planted_rate_pos: float = 0.02,
    background_rate: float = 0.002,
    pos_fraction: float = 0.25,
    seed: int = 0,
    unit_length: int = 100,
    query_token: str = "topicquery",
    planted_tokens: Sequence[str] | None = None,
    n_common: int = 20,
    common_rate: float = 0.024,
    source: str = "synthetic",
    date_start: str | datetime | None = None,
    date_end: str | datetime | None = None,
) -> tuple[Corpus, PlantedTruth]:
    """Generate a corpus with a known predictive signal.

    The background mimics real text: ``n_common`` high-frequency
    low-content tokens appear at ``common_rate`` per position in *both*
    classes (so they dominate raw counts yet carry no label signal),
    and the rest of the vocabulary spreads uniformly over the remaining
    mass.  Planted tokens appear at ``background_rate`` per position in
    negative units and at ``planted_rate_pos`` in positive units; the
    query token appears only in positive units, so a one-hit rule
    recovers the designated labels exactly.
    """
    if not (0.0 < background_rate < 1.0 and 0.0 < planted_rate_pos < 1.0):
        raise ValueError("rates must lie in (0, 1)")
    if n_planted + n_common >= vocab_size:
        raise ValueError("n_planted + n_common must be smaller than vocab_size")
    if n_planted * max(planted_rate_pos, background_rate) + n_common * common_rate >= 1.0:
        raise ValueError("planted plus common probability mass must stay below 1")
    if not (0.0 < pos_fraction < 1.0):
        raise ValueError("pos_fraction must lie in (0, 1)")

    rng = np.random.default_rng(seed)
    n_tail = vocab_size - n_planted - n_common
    common = [f"c{idx:03d}" for idx in range(n_common)]
    tail = [f"w{idx:05d}" for idx in range(n_tail)]
    if planted_tokens is None:
        planted = [f"signal{idx:02d}" for idx in range(n_planted)]
    else:
        planted = list(planted_tokens)
        if len(planted) != n_planted:
            raise ValueError("planted_tokens length must equal n_planted")

    def token_probs(planted_rate: float) -> tuple[list[str], np.ndarray]:
        tail_mass = 1.0 - n_planted * planted_rate - n_common * common_rate
        probs = np.concatenate(
            [
                np.full(n_planted, planted_rate),
                np.full(n_common, common_rate),
                np.full(n_tail, tail_mass / n_tail),
            ]
        )
        return planted + common + tail, probs

    pos_tokens, pos_probs = token_probs(planted_rate_pos)
    neg_tokens, neg_probs = token_probs(background_rate)

    n_pos = int(round(n_units * pos_fraction))
    positive_rows = set(rng.choice(n_units, size=n_pos, replace=False).tolist())

    if date_start is not None and date_end is not None:
        t0 = parse_timestamp(date_start)
        t1 = parse_timestamp(date_end)
        stamps = [t0 + (t1 - t0) * (i / max(1, n_units - 1)) for i in range(n_units)]
    else:
        stamps = [datetime(2020, 1, 1, tzinfo=timezone.utc) + timedelta(hours=i) for i in range(n_units)]

    documents = []
    positive_ids = []
    for i in range(n_units):
        is_positive = i in positive_rows
        tokens_pool, probs = (pos_tokens, pos_probs) if is_positive else (neg_tokens, neg_probs)
        draw = rng.choice(len(tokens_pool), size=unit_length, p=probs)
        words = [tokens_pool[t] for t in draw]
        if is_positive:
            n_marks = 1 + int(rng.poisson(0.5))
            for pos in rng.choice(unit_length, size=min(n_marks, unit_length), replace=False):
                words[pos] = query_token
        doc_id = f"u{i:05d}"
        if is_positive:
            positive_ids.append(doc_id)
        documents.append(
            Document(
                id=doc_id,
                body=" ".join(words),
                source=source,
                published_at=stamps[i],
            )
        )
    corpus = Corpus(
        name=f"synthetic-{seed}",
        documents=documents,
        provenance={"generator": "synthetic_corpus", "seed": seed},
    )
    return corpus, PlantedTruth(planted=planted, query_token=query_token, positive_ids=positive_ids)
