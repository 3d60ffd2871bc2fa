"""Command-line interface.

Defaults follow the configuration that held up best across document
sizes: the squared-loss sparse selector over article units with
unit-norm column rescaling, a one-hit labeling rule, and 15-phrase
summaries.  Errors exit nonzero with a single machine-parsable line on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import ingest_jsonl, segment
from .errors import PhraseSiftError
from .labeling import LabelingRule, QuerySet
from .pipeline import (
    ComparisonSpec,
    SnapshotSpec,
    build_matrix,
    compare_between,
    compare_within,
    kwic,
    near_duplicates,
    run_summary,
    snapshot_grid_csv,
    snapshot_series,
)
from .select import SelectorConfig
from .stopwords import DEFAULT_STOPWORDS, STOPLIST_VERSION, load_stoplist
from .store import RunStore, summary_config


def _selector_config(args) -> SelectorConfig:
    return SelectorConfig(method=args.method, k=args.k)


def _query_set(args) -> QuerySet:
    terms = [t for chunk in args.terms for t in chunk.split(",") if t.strip()]
    ban = [t for chunk in (args.ban or []) for t in chunk.split(",") if t.strip()]
    return QuerySet(topic=args.topic or (terms[0] if terms else ""), terms=tuple(terms), ban=tuple(ban))


def _stoplist(args):
    return load_stoplist(args.stoplist) if getattr(args, "stoplist", None) else None


def _load_corpus(args):
    """Resolve --corpus as a JSONL path or a name in the run store."""
    ref = args.corpus
    path = Path(ref)
    if path.exists():
        return ingest_jsonl(path), None
    store = RunStore(args.store)
    if store.corpus_path(ref).exists():
        return store.load_corpus(ref), store
    raise PhraseSiftError(f"corpus {ref!r} is neither a file nor a stored corpus name")


def _print_summary(summary, args):
    if args.json:
        print(summary.to_json(indent=2))
        return
    phrases = summary.alphabetical() if args.alphabetical else summary.phrases
    print(f"# topic: {summary.topic}  method: {summary.method}  scheme: {summary.scheme}")
    lam = f"  lambda: {summary.lam:.6g}" if summary.lam is not None else ""
    print(f"# units: +{summary.n_pos} / -{summary.n_neg}{lam}")
    if summary.warning:
        print(f"# warning: {summary.warning}")
    for rank, (phrase, score) in enumerate(phrases, start=1):
        print(f"{rank:3d}  {phrase:40s} {score: .6g}")


def cmd_ingest(args) -> int:
    store = RunStore(args.store)
    text = Path(args.jsonl).read_text(encoding="utf-8")
    name = args.name or Path(args.jsonl).stem
    meta = store.add_corpus(name, text)
    print(json.dumps(meta, indent=2))
    return 0


def cmd_summarize(args) -> int:
    query = _query_set(args)
    rule = LabelingRule.parse(args.rule)
    selector = _selector_config(args)
    corpus, store = _load_corpus(args)
    if store is not None:
        config = summary_config(
            query, rule, args.unit, args.scheme, selector,
            tuple(args.ngram_range), args.min_df,
        )
        record, cached = store.submit(args.corpus, config)
        if record.status == "error":
            raise PhraseSiftError("; ".join(record.messages))
        if args.json:
            print(json.dumps(record.to_dict(), indent=2))
        else:
            from .select import Summary

            print(f"# run: {record.run_id}{' (cached)' if cached else ''}")
            _print_summary(Summary.from_dict(record.result["summary"]), args)
        return 0
    units = segment(corpus, args.unit)
    counts = build_matrix(units, tuple(args.ngram_range), args.min_df, args.unit)
    summary = run_summary(counts, query, rule, args.scheme, selector, args.unit, _stoplist(args))
    _print_summary(summary, args)
    return 0


def cmd_snapshot(args) -> int:
    spec_payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    corpus, _ = _load_corpus(args)
    spec = SnapshotSpec.from_dict(spec_payload)
    results = snapshot_series(corpus, spec, stoplist=_stoplist(args), n_workers=args.workers)
    if args.grid_csv:
        Path(args.grid_csv).write_text(snapshot_grid_csv(results), encoding="utf-8")
        print(f"wrote grid: {args.grid_csv}")
    print(json.dumps([r.to_dict() for r in results], indent=2))
    return 0


def cmd_compare(args) -> int:
    corpus, _ = _load_corpus(args)
    query = _query_set(args) if args.terms else None
    spec = ComparisonSpec(
        mode="between_source" if args.mode == "between" else "within_source",
        source_a=args.source_a,
        source_b=args.source_b,
        query=query,
        rule=LabelingRule.parse(args.rule),
        unit_kind=args.unit,
        scheme=args.scheme,
        selector=_selector_config(args),
        min_df=args.min_df,
    )
    if spec.mode == "between_source":
        summary = compare_between(corpus, spec, stoplist=_stoplist(args))
    else:
        summary = compare_within(corpus, spec, stoplist=_stoplist(args))
    _print_summary(summary, args)
    return 0


def cmd_kwic(args) -> int:
    corpus, _ = _load_corpus(args)
    units = segment(corpus, args.unit)
    snippets = kwic(units, args.phrase, max_samples=args.limit, window_tokens=args.window, seed=args.seed)
    for snippet in snippets:
        print(f"[{snippet.unit_id}] ...{snippet.highlighted()}...")
    if not snippets:
        print(f"no occurrences of {args.phrase!r}", file=sys.stderr)
    return 0


def cmd_dupes(args) -> int:
    corpus, _ = _load_corpus(args)
    units = segment(corpus, args.unit)
    counts = build_matrix(units, (1, 1), 1, args.unit)
    pairs = near_duplicates(counts, args.threshold)
    involved = {i for pair in pairs for i in pair[:2]}
    for i, j, cosine in pairs[: args.limit]:
        print(f"{units[i].unit_id}\t{units[j].unit_id}\t{cosine:.4f}")
    print(
        f"# {len(pairs)} pair(s) at cosine >= {args.threshold}; "
        f"{len(involved)}/{len(units)} units involved",
        file=sys.stderr,
    )
    return 0


def cmd_stoplist(args) -> int:
    if args.action == "print":
        print(f"# built-in stop list, version {STOPLIST_VERSION} ({len(DEFAULT_STOPWORDS)} words)")
        for word in sorted(DEFAULT_STOPWORDS):
            print(word)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_selection_options(parser: argparse.ArgumentParser):
    parser.add_argument("--terms", action="append", default=[], help="query phrases, comma-separated (repeatable)")
    parser.add_argument("--ban", action="append", default=[], help="phrases banned from summaries")
    parser.add_argument("--topic", default=None, help="display name of the topic")
    parser.add_argument("--rule", default="count:1", help="labeling rule, e.g. count:1 or hcount:2")
    parser.add_argument("--unit", default="article", choices=["article", "paragraph", "headline"])
    parser.add_argument("--scheme", default="l2", choices=["raw", "stopword", "l2", "tfidf"])
    parser.add_argument("--method", default="lasso", choices=["cooccurrence", "correlation", "lasso", "l1lr"])
    parser.add_argument("--k", type=int, default=15, help="target summary length")
    parser.add_argument("--ngram-range", type=int, nargs=2, default=(1, 3), metavar=("MIN", "MAX"))
    parser.add_argument("--min-df", type=int, default=None, help="document-frequency floor")
    parser.add_argument("--stoplist", default=None, help="stop-word file (one word per line)")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    parser.add_argument("--alphabetical", action="store_true", help="order phrases alphabetically")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phrasesift", description=__doc__)
    parser.add_argument("--store", default="phrasesift_store", help="run-store directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a JSONL corpus into the store")
    p.add_argument("jsonl")
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", help="summarize a topic in a corpus")
    p.add_argument("--corpus", required=True, help="stored corpus name or JSONL path")
    _add_selection_options(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("snapshot", help="run a windowed snapshot series from a JSON spec")
    p.add_argument("--corpus", required=True)
    p.add_argument("--spec", required=True, help="SnapshotSpec JSON file")
    p.add_argument("--grid-csv", default=None, help="also write a phrase-by-window rank grid")
    p.add_argument("--stoplist", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("compare", help="between-source or within-source comparison")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", required=True, choices=["between", "within"])
    p.add_argument("--source-a", required=True)
    p.add_argument("--source-b", default=None)
    _add_selection_options(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("kwic", help="show phrase occurrences in context")
    p.add_argument("--corpus", required=True)
    p.add_argument("--phrase", required=True)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unit", default="article", choices=["article", "paragraph", "headline"])
    p.set_defaults(func=cmd_kwic)

    p = sub.add_parser("dupes", help="report near-duplicate units by cosine similarity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--limit", type=int, default=50)
    p.add_argument("--unit", default="article", choices=["article", "paragraph", "headline"])
    p.set_defaults(func=cmd_dupes)

    p = sub.add_parser("stoplist", help="inspect the built-in stop list")
    p.add_argument("action", choices=["print"])
    p.set_defaults(func=cmd_stoplist)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8600)
    p.add_argument("--ui", default=None, help="directory with the built explorer to serve at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PhraseSiftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: ValueError: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
