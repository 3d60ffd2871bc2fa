#!/usr/bin/env python3
"""Run all four selection methods side by side on one topic.

Produces a four-column table (co-occurrence, correlation, l1lr, lasso)
for a query against a user-supplied JSONL corpus, using count-2
labeling over article units with unit-norm column rescaling, so the
methods' characteristic differences (stop-word pollution in the
screens, redundancy, the sparse methods' tighter lists) are visible on
your own data.

Example:
    python recipes/method_comparison.py corpus.jsonl \
        --terms china,chinas,chinese --k 15
"""

import argparse

from phrasesift import (
    LabelingRule,
    QuerySet,
    SelectorConfig,
    build_matrix,
    ingest_jsonl,
    run_summary,
    segment,
)

METHODS = ("cooccurrence", "correlation", "l1lr", "lasso")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("corpus", help="JSONL corpus path")
    parser.add_argument("--terms", required=True, help="comma-separated query phrases")
    parser.add_argument("--ban", default="", help="comma-separated banned phrases")
    parser.add_argument("--k", type=int, default=15)
    parser.add_argument("--rule", default="count:2")
    parser.add_argument("--scheme", default="l2")
    parser.add_argument("--unit", default="article")
    args = parser.parse_args()

    corpus = ingest_jsonl(args.corpus)
    units = segment(corpus, args.unit)
    counts = build_matrix(units, (1, 3), None, args.unit)
    query = QuerySet(
        topic=args.terms.split(",")[0],
        terms=tuple(t for t in args.terms.split(",") if t),
        ban=tuple(t for t in args.ban.split(",") if t),
    )
    rule = LabelingRule.parse(args.rule)

    columns = {}
    for method in METHODS:
        summary = run_summary(
            counts, query, rule, args.scheme,
            SelectorConfig(method=method, k=args.k), args.unit,
        )
        # alphabetical display makes the four lists easy to eyeball
        columns[method] = [p for p, _ in summary.alphabetical()]

    width = max(12, max(len(p) for col in columns.values() for p in col or [""]) + 2)
    print("".join(m.ljust(width) for m in METHODS))
    print("-" * width * len(METHODS))
    for row in range(max(len(c) for c in columns.values())):
        cells = [
            columns[m][row] if row < len(columns[m]) else "" for m in METHODS
        ]
        print("".join(c.ljust(width) for c in cells))


if __name__ == "__main__":
    main()
