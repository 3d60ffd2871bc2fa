/**
 * Phrase-level diff between two runs: what entered, what left, what
 * stayed.  This automates the side-by-side reading of consecutive
 * summaries during query refinement.
 */

import type { RunRecord, SummaryPayload } from "./types";

export interface PhraseDiff {
  entering: string[];
  leaving: string[];
  staying: string[];
}

export function summaryPhrases(summary: SummaryPayload | null | undefined): string[] {
  return summary ? summary.phrases.map((entry) => entry.phrase) : [];
}

export function runPhrases(record: RunRecord): string[] {
  if (record.result?.summary) {
    return summaryPhrases(record.result.summary);
  }
  if (record.result?.snapshots) {
    const seen = new Set<string>();
    for (const snapshot of record.result.snapshots) {
      for (const phrase of summaryPhrases(snapshot.summary)) {
        seen.add(phrase);
      }
    }
    return [...seen].sort();
  }
  return [];
}

export function diffPhrases(previous: string[], next: string[]): PhraseDiff {
  const before = new Set(previous);
  const after = new Set(next);
  return {
    entering: next.filter((p) => !before.has(p)),
    leaving: previous.filter((p) => !after.has(p)),
    staying: next.filter((p) => before.has(p)),
  };
}

export function diffRuns(previous: RunRecord | null, next: RunRecord): PhraseDiff {
  return diffPhrases(previous ? runPhrases(previous) : [], runPhrases(next));
}
