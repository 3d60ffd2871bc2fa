"""Phrase selection: scoring screens, sparse fits, and summary assembly.

Two scoring screens rank every phrase independently (mean weight in the
positive units; absolute Pearson correlation with the labels) and take
the top k distinct phrases.  The sparse methods fit an L1-penalized
model and harvest the phrases with nonzero coefficients, using a line
search over the penalty to land the summary length as close as possible
to, but never above, the target k.

Distinctness rule: no phrase in a summary may be a contiguous token
subsequence of another (if "united states" and "united" are both
selected, "united" goes).  Support sizes in the line search are counted
after this deduplication so the constraint binds on the final summary.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import DegenerateLabelsError
from .labeling import LabelVector
from .rescale import FeatureMatrix
from .solvers import FITTERS, SparseModel

METHODS = ("cooccurrence", "correlation", "lasso", "l1lr")
SPARSE_METHODS = ("lasso", "l1lr")


@dataclass(frozen=True)
class SelectorConfig:
    """Selection method plus solver and penalty-search settings."""

    method: str = "lasso"
    k: int = 15
    solver_tol: float = 1e-7
    max_sweeps: int = 10_000
    bracket_factor: float = 2.0
    bisection_depth: int = 30
    lambda_floor_ratio: float = 2.0**-40

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.k < 1:
            raise ValueError("summary length k must be >= 1")
        if self.solver_tol <= 0:
            raise ValueError("solver_tol must be positive")
        if self.bracket_factor <= 1:
            raise ValueError("bracket_factor must exceed 1")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, payload: dict) -> "SelectorConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in payload.items() if k in known})


@dataclass
class ScoredPhrases:
    """One relevance score per feature column."""

    scores: np.ndarray
    method: str


@dataclass
class Summary:
    """A ranked list of distinct key phrases plus the configuration echo."""

    topic: str
    phrases: list[tuple[str, float]]
    method: str
    scheme: str | None = None
    rule: str | None = None
    unit_kind: str | None = None
    lam: float | None = None
    n_pos: int = 0
    n_neg: int = 0
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    warning: str | None = None

    def __len__(self) -> int:
        return len(self.phrases)

    def phrase_list(self) -> list[str]:
        return [phrase for phrase, _ in self.phrases]

    def alphabetical(self) -> list[tuple[str, float]]:
        return sorted(self.phrases, key=lambda item: item[0])

    def to_dict(self) -> dict:
        return {
            "topic": self.topic,
            "phrases": [{"phrase": p, "score": s} for p, s in self.phrases],
            "method": self.method,
            "scheme": self.scheme,
            "rule": self.rule,
            "unit_kind": self.unit_kind,
            "lambda": self.lam,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "created_at": self.created_at,
            "warning": self.warning,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["rank", "phrase", "score", "lambda", "method"])
        for rank, (phrase, score) in enumerate(self.phrases, start=1):
            writer.writerow([rank, phrase, repr(score), self.lam, self.method])
        return buffer.getvalue()

    @classmethod
    def from_dict(cls, payload: dict) -> "Summary":
        return cls(
            topic=payload.get("topic", ""),
            phrases=[(e["phrase"], float(e["score"])) for e in payload.get("phrases", [])],
            method=payload["method"],
            scheme=payload.get("scheme"),
            rule=payload.get("rule"),
            unit_kind=payload.get("unit_kind"),
            lam=payload.get("lambda"),
            n_pos=payload.get("n_pos", 0),
            n_neg=payload.get("n_neg", 0),
            created_at=payload.get("created_at", ""),
            warning=payload.get("warning"),
        )


def _kept_rows(feats: FeatureMatrix, labels: LabelVector) -> tuple[sp.csr_matrix, np.ndarray]:
    if labels.n_rows != feats.n:
        raise ValueError(
            f"labels cover {labels.n_rows} rows but the matrix has {feats.n}"
        )
    kept = labels.kept
    matrix = feats.matrix if kept.size == feats.n else feats.matrix[kept]
    return matrix, labels.values[kept].astype(np.float64)


def score_cooccurrence(feats: FeatureMatrix, labels: LabelVector) -> ScoredPhrases:
    """Mean feature weight over the positively labeled units, per column."""
    matrix, y = _kept_rows(feats, labels)
    positives = np.flatnonzero(y > 0)
    if positives.size == 0:
        raise DegenerateLabelsError("co-occurrence scoring needs at least one positive unit")
    scores = np.asarray(matrix[positives].sum(axis=0)).ravel() / positives.size
    return ScoredPhrases(scores, "cooccurrence")


def score_correlation(feats: FeatureMatrix, labels: LabelVector) -> ScoredPhrases:
    """Absolute Pearson correlation of each column with the labels.

    Columns with zero variance score 0.
    """
    matrix, y = _kept_rows(feats, labels)
    n = matrix.shape[0]
    if n < 2:
        raise DegenerateLabelsError("correlation scoring needs at least two units")
    col_sum = np.asarray(matrix.sum(axis=0)).ravel()
    col_sq = np.asarray(matrix.multiply(matrix).sum(axis=0)).ravel()
    xy = matrix.T @ y
    y_centered = y - y.mean()
    sy = math.sqrt(float(y_centered @ y_centered))
    var_term = col_sq - col_sum**2 / n
    var_term = np.maximum(var_term, 0.0)
    cov_term = xy - col_sum * y.mean()
    scores = np.zeros(matrix.shape[1])
    ok = (var_term > 0) & (sy > 0)
    scores[ok] = np.abs(cov_term[ok] / (np.sqrt(var_term[ok]) * sy))
    return ScoredPhrases(scores, "correlation")


def class_means(feats: FeatureMatrix, labels: LabelVector) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean feature weight in the positive and negative units."""
    matrix, y = _kept_rows(feats, labels)
    pos = np.flatnonzero(y > 0)
    neg = np.flatnonzero(y < 0)
    mean_pos = np.asarray(matrix[pos].sum(axis=0)).ravel() / pos.size
    mean_neg = np.asarray(matrix[neg].sum(axis=0)).ravel() / neg.size
    return mean_pos, mean_neg


def label_covariance(feats: FeatureMatrix, labels: LabelVector) -> np.ndarray:
    """Population covariance (divide by n) of each column with the labels."""
    matrix, y = _kept_rows(feats, labels)
    n = matrix.shape[0]
    xy = matrix.T @ y
    col_mean = np.asarray(matrix.sum(axis=0)).ravel() / n
    return xy / n - col_mean * y.mean()


def _phrase_contains(outer: tuple[str, ...], inner: tuple[str, ...]) -> bool:
    if len(inner) > len(outer):
        return False
    span = len(inner)
    return any(outer[s : s + span] == inner for s in range(len(outer) - span + 1))


def select_distinct(
    items: list[tuple[str, float]], k: int | None = None
) -> list[tuple[str, float]]:
    """Greedy scan of (phrase, score) pairs keeping phrases distinct.

    A candidate that is a sub-phrase of an accepted phrase is skipped; a
    candidate that contains an accepted phrase replaces it.  With ``k``
    the scan stops as soon as k phrases are accepted; without it the
    whole list is processed (used for counting a model's effective
    support).
    """
    accepted: list[tuple[str, float]] = []
    token_seqs: list[tuple[str, ...]] = []
    for phrase, score in items:
        tokens = tuple(phrase.split(" "))
        if any(_phrase_contains(existing, tokens) for existing in token_seqs):
            continue
        keep = [i for i, existing in enumerate(token_seqs) if not _phrase_contains(tokens, existing)]
        if len(keep) != len(token_seqs):
            accepted = [accepted[i] for i in keep]
            token_seqs = [token_seqs[i] for i in keep]
        accepted.append((phrase, score))
        token_seqs.append(tokens)
        if k is not None and len(accepted) == k:
            break
    return accepted


def ranked_items(scores: np.ndarray, phrases: list[str]) -> list[tuple[str, float]]:
    """Pairs ordered by descending score, ties by ascending column index."""
    order = np.lexsort((np.arange(scores.size), -scores))
    return [(phrases[j], float(scores[j])) for j in order]


def top_k_distinct(scored: ScoredPhrases, feats: FeatureMatrix, k: int) -> list[tuple[str, float]]:
    """Top-k distinct phrases under the sub-phrase rule."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return select_distinct(ranked_items(scored.scores, feats.phrases()), k=k)


def _support_items(model: SparseModel, phrases: list[str]) -> list[tuple[str, float]]:
    entries = sorted(model.beta.items(), key=lambda item: (-abs(item[1]), item[0]))
    return [(phrases[j], value) for j, value in entries]


def distinct_support_size(model: SparseModel, phrases: list[str]) -> int:
    return len(select_distinct(_support_items(model, phrases)))


@dataclass
class LambdaSearchResult:
    lam: float
    model: SparseModel
    support_size: int
    probes: list[tuple[float, int]]
    warning: str | None = None


def search_lambda(
    X,
    y,
    k: int,
    method: str,
    config: SelectorConfig,
    phrases: list[str] | None = None,
) -> LambdaSearchResult:
    """Line search for the penalty giving the largest support not above k.

    Brackets from the full-shrinkage threshold downward by repeated
    halving until the (deduplicated) support exceeds k, then bisects on
    log(lambda) for a fixed depth, warm-starting every fit from the
    previous solution.  Among all probed penalties with support <= k,
    the one with the largest support wins; ties go to the smallest
    penalty.
    """
    fit, lambda_max = FITTERS[method]
    p = X.shape[1]
    if phrases is None:
        def support_size(model):
            return model.support_size
    else:
        def support_size(model):
            return distinct_support_size(model, phrases)

    def run(lam, previous):
        return fit(
            X,
            y,
            lam,
            tol=config.solver_tol,
            max_sweeps=config.max_sweeps,
            beta0=previous.dense() if previous is not None else None,
            gamma0=previous.gamma if previous is not None else None,
        )

    # Tiny relative margin so the upper bracket survives float rounding
    # at the exact shrinkage boundary.
    lam_hi = lambda_max(X, y) * (1.0 + 1e-10)
    if lam_hi <= 0.0:
        model = fit(X, y, max(lam_hi, 1e-300), tol=config.solver_tol, max_sweeps=config.max_sweeps)
        return LambdaSearchResult(
            lam=model.lam,
            model=model,
            support_size=support_size(model),
            probes=[(model.lam, support_size(model))],
            warning="no column correlates with the labels; penalty search degenerate",
        )

    probes: list[tuple[float, SparseModel, int]] = []

    def probe(lam, previous):
        model = run(lam, previous)
        probes.append((lam, model, support_size(model)))
        return model

    model = probe(lam_hi, None)
    floor = lam_hi * config.lambda_floor_ratio
    lam = lam_hi
    crossed = False
    while lam / config.bracket_factor >= floor:
        lam = lam / config.bracket_factor
        model = probe(lam, model)
        if probes[-1][2] > k:
            crossed = True
            break

    if crossed:
        lo, hi = lam, lam * config.bracket_factor
        for _ in range(config.bisection_depth):
            mid = math.sqrt(lo * hi)
            model = probe(mid, model)
            if probes[-1][2] > k:
                lo = mid
            else:
                hi = mid

    best = None
    for l, m, s in probes:
        if s <= k and (best is None or (s, -l) > (best[2], -best[0])):
            best = (l, m, s)
    if best is None:  # unreachable: the lam_hi probe has support 0
        lam, model, s = probes[0][0], probes[0][1], probes[0][2]
    else:
        lam, model, s = best
    warning = None
    if s < 1:
        warning = (
            f"penalty search found no non-empty support of size <= {k} "
            f"down to the floor {floor:.3e}"
        )
    return LambdaSearchResult(
        lam=lam,
        model=model,
        support_size=s,
        probes=[(l, s) for l, _, s in probes],
        warning=warning,
    )


def summarize(
    feats: FeatureMatrix,
    labels: LabelVector,
    config: SelectorConfig,
    topic: str = "",
    scheme: str | None = None,
    rule: str | None = None,
    unit_kind: str | None = None,
) -> Summary:
    """Run the configured selection method and assemble the summary."""
    scheme = scheme if scheme is not None else feats.scheme
    warning = None
    lam = None
    if config.method in SPARSE_METHODS:
        matrix, y = _kept_rows(feats, labels)
        phrases = feats.phrases()
        result = search_lambda(matrix, y, config.k, config.method, config, phrases)
        items = select_distinct(_support_items(result.model, phrases))[: config.k]
        lam = result.lam
        warning = result.warning
    elif config.method == "cooccurrence":
        items = top_k_distinct(score_cooccurrence(feats, labels), feats, config.k)
    else:
        items = top_k_distinct(score_correlation(feats, labels), feats, config.k)
    return Summary(
        topic=topic,
        phrases=items,
        method=config.method,
        scheme=scheme,
        rule=rule,
        unit_kind=unit_kind,
        lam=lam,
        n_pos=labels.n_pos,
        n_neg=labels.n_neg,
        warning=warning,
    )


class PhraseSelector(BaseEstimator):
    """Estimator facade: fit on (features, labels), inspect the summary.

    ``transform`` reduces a feature matrix to the selected phrase
    columns, so the selector slots into feature-selection pipelines.
    """

    def __init__(
        self,
        method: str = "lasso",
        k: int = 15,
        solver_tol: float = 1e-7,
        max_sweeps: int = 10_000,
        bisection_depth: int = 30,
    ):
        self.method = method
        self.k = k
        self.solver_tol = solver_tol
        self.max_sweeps = max_sweeps
        self.bisection_depth = bisection_depth

    def _config(self) -> SelectorConfig:
        return SelectorConfig(
            method=self.method,
            k=self.k,
            solver_tol=self.solver_tol,
            max_sweeps=self.max_sweeps,
            bisection_depth=self.bisection_depth,
        )

    def fit(self, feats: FeatureMatrix, labels: LabelVector) -> "PhraseSelector":
        summary = summarize(feats, labels, self._config())
        self.summary_ = summary
        self.lambda_ = summary.lam
        self.selected_phrases_ = summary.phrase_list()
        phrase_to_column = {phrase: j for j, phrase in enumerate(feats.phrases())}
        self.selected_columns_ = np.array(
            [phrase_to_column[p] for p in self.selected_phrases_], dtype=np.int64
        )
        return self

    def transform(self, feats: FeatureMatrix):
        if not hasattr(self, "summary_"):
            raise NotFittedError("PhraseSelector must be fitted before transform")
        return feats.matrix[:, self.selected_columns_]

    def fit_transform(self, feats: FeatureMatrix, labels: LabelVector):
        return self.fit(feats, labels).transform(feats)
