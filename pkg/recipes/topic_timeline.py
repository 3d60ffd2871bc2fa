#!/usr/bin/env python3
"""Summarize a topic inside consecutive time windows and print the grid.

Windows are given as name=start..end (dates ISO, end exclusive) and are
typically chosen around known events.  The table has one column per
window so entering and leaving phrases stand out; per-window volume
statistics (units, positives, positives/week, share) print underneath.
Iterate by adding uninformative phrases to --ban and re-running.

Example:
    python recipes/topic_timeline.py corpus.jsonl \
        --terms egypt,egypts,egyptian,egyptians,cairo,mubarak \
        --window 2009=2009-01-01..2010-01-01 \
        --window before=2010-11-01..2010-12-16 \
        --window uprising=2010-12-17..2011-03-01 \
        --ban arab,hosni
"""

import argparse
import sys

from phrasesift import (
    LabelingRule,
    QuerySet,
    SelectorConfig,
    SnapshotSpec,
    Window,
    ingest_jsonl,
    snapshot_series,
)
from phrasesift.pipeline import snapshot_grid_csv


def parse_window(text):
    name, _, span = text.partition("=")
    start, _, end = span.partition("..")
    if not (name and start and end):
        raise argparse.ArgumentTypeError(f"expected name=start..end, got {text!r}")
    return Window.of(name, start, end)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("corpus")
    parser.add_argument("--terms", required=True)
    parser.add_argument("--ban", default="")
    parser.add_argument("--window", action="append", type=parse_window, required=True)
    parser.add_argument("--k", type=int, default=15)
    parser.add_argument("--method", default="lasso")
    parser.add_argument("--scheme", default="l2")
    parser.add_argument("--unit", default="article")
    parser.add_argument("--rule", default="count:1")
    parser.add_argument("--grid-csv", default=None)
    args = parser.parse_args()

    corpus = ingest_jsonl(args.corpus)
    spec = SnapshotSpec(
        query=QuerySet(
            topic=args.terms.split(",")[0],
            terms=tuple(t for t in args.terms.split(",") if t),
            ban=tuple(t for t in args.ban.split(",") if t),
        ),
        windows=args.window,
        rule=LabelingRule.parse(args.rule),
        unit_kind=args.unit,
        scheme=args.scheme,
        selector=SelectorConfig(method=args.method, k=args.k),
    )
    results = snapshot_series(corpus, spec)

    grid = snapshot_grid_csv(results)
    if args.grid_csv:
        with open(args.grid_csv, "w", encoding="utf-8") as handle:
            handle.write(grid)
        print(f"wrote {args.grid_csv}", file=sys.stderr)

    rows = [line.split(",") for line in grid.splitlines()]
    widths = [max(len(cell) for cell in col) + 2 for col in zip(*rows)]
    for row in rows:
        print("".join(cell.ljust(w) for cell, w in zip(row, widths)))
    print()
    for result in results:
        window = result.window
        status = result.error or "ok"
        print(
            f"{window.name}: units={result.n_units} positives={result.n_positive} "
            f"per_week={result.positives_per_week:.1f} share={result.positive_share:.1%} [{status}]"
        )


if __name__ == "__main__":
    main()
