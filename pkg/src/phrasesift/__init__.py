"""Comparative key-phrase summaries of text corpora via sparse classification.

Given a topic query, units of a corpus are labeled on- or off-topic,
phrase counts are rescaled, and a sparse model (or a simple scoring
screen) picks the short list of phrases most predictive of the labels.
The selected phrases, read together, summarize how the topic is covered
relative to the rest of the corpus.
"""

from .corpus import Corpus, Document, DocumentUnit, filter_window, ingest_jsonl, segment
from .errors import (
    DegenerateLabelsError,
    EmptyMatrixError,
    EmptyVocabularyError,
    IngestError,
    PhraseSiftError,
)
from .labeling import (
    LabelVector,
    LabelingRule,
    QuerySet,
    apply_rule,
    count_query_hits,
    label_by_metadata,
    strip_query_columns,
)
from .pipeline import (
    ComparisonSpec,
    SnapshotResult,
    SnapshotSpec,
    Window,
    build_matrix,
    compare_between,
    compare_within,
    kwic,
    near_duplicates,
    run_summary,
    snapshot_series,
    synthetic_corpus,
)
from .rescale import (
    ColumnRescaler,
    FeatureMatrix,
    as_features,
    build_features,
    remove_stopwords,
    rescale_l2,
    rescale_tfidf,
)
from .select import (
    PhraseSelector,
    ScoredPhrases,
    SelectorConfig,
    Summary,
    score_cooccurrence,
    score_correlation,
    search_lambda,
    select_distinct,
    summarize,
    top_k_distinct,
)
from .solvers import SparseModel, fit_l1lr, fit_lasso, l1lr_lambda_max, lasso_lambda_max
from .stopwords import DEFAULT_STOPWORDS, load_stoplist
from .store import RunRecord, RunStore
from .tokenize import normalize_phrase, tokenize, tokenize_spans
from .vectorize import (
    CountMatrix,
    PhraseVectorizer,
    PhraseVocabulary,
    build_count_matrix,
    build_vocabulary,
)

__version__ = "0.1.0"
