#!/usr/bin/env python3
"""Contrast two sources on a topic: head-to-head, then within each source.

The head-to-head (between-source) run keeps only units mentioning the
topic, labels them by source, and summarizes: it surfaces both style and
content differences.  The two within-source runs compare each source's
on-topic units to its own off-topic ones, subtracting style so the
remaining phrases are content.  Headline-grain corpora work best with
the default unit-norm rescaling and no stop-word removal.

Example:
    python recipes/source_contrast.py headlines.jsonl \
        --source-a NYT --source-b WSJ \
        --terms oil,gas,energy,electricity,solar --unit headline
"""

import argparse

from phrasesift import (
    ComparisonSpec,
    LabelingRule,
    QuerySet,
    SelectorConfig,
    compare_between,
    compare_within,
    ingest_jsonl,
)


def show(summary, label):
    print(f"== {label}")
    for rank, (phrase, score) in enumerate(summary.phrases, start=1):
        print(f"  {rank:3d}  {phrase:32s} {score: .4g}")
    if summary.warning:
        print(f"  warning: {summary.warning}")
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("corpus")
    parser.add_argument("--source-a", required=True)
    parser.add_argument("--source-b", required=True)
    parser.add_argument("--terms", required=True)
    parser.add_argument("--ban", default="")
    parser.add_argument("--k", type=int, default=15)
    parser.add_argument("--unit", default="headline")
    parser.add_argument("--scheme", default="l2")
    args = parser.parse_args()

    corpus = ingest_jsonl(args.corpus)
    query = QuerySet(
        topic=args.terms.split(",")[0],
        terms=tuple(t for t in args.terms.split(",") if t),
        ban=tuple(t for t in args.ban.split(",") if t),
    )
    selector = SelectorConfig(method="lasso", k=args.k)

    between = compare_between(
        corpus,
        ComparisonSpec(
            mode="between_source", source_a=args.source_a, source_b=args.source_b,
            query=query, unit_kind=args.unit, scheme=args.scheme, selector=selector,
        ),
    )
    show(between, f"{args.source_a} (+) vs {args.source_b} (-), on-topic units only")

    for source in (args.source_a, args.source_b):
        within = compare_within(
            corpus,
            ComparisonSpec(
                mode="within_source", source_a=source, query=query,
                rule=LabelingRule("count", 1), unit_kind=args.unit,
                scheme=args.scheme, selector=selector,
            ),
        )
        show(within, f"on-topic vs off-topic within {source}")


if __name__ == "__main__":
    main()
