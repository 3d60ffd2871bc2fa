/**
 * Wire types mirroring the service's JSON schema exactly.  The explorer
 * never recomputes scores client-side: everything displayed comes out
 * of these payloads.
 */

export interface QueryConfig {
  topic: string;
  terms: string[];
  ban: string[];
}

export interface RuleConfig {
  kind: "count" | "hcount";
  k: number;
}

export interface SelectorSettings {
  method: "cooccurrence" | "correlation" | "lasso" | "l1lr";
  k: number;
}

export type UnitKind = "article" | "paragraph" | "headline";
export type Scheme = "raw" | "stopword" | "l2" | "tfidf";

export interface WindowSpec {
  name: string;
  start: string;
  end: string;
}

export interface SummaryEntry {
  phrase: string;
  score: number;
}

export interface SummaryPayload {
  topic: string;
  phrases: SummaryEntry[];
  method: string;
  scheme: string | null;
  rule: string | null;
  unit_kind: string | null;
  lambda: number | null;
  n_pos: number;
  n_neg: number;
  created_at: string;
  warning: string | null;
}

export interface SnapshotPayload {
  window: { name: string; start: string; end: string };
  summary: SummaryPayload | null;
  n_units: number;
  n_positive: number;
  positives_per_week: number;
  positive_share: number;
  error: string | null;
}

export interface RunRecord {
  run_id: string;
  created_at: string;
  corpus: { name: string; hash: string };
  kind: "summary" | "snapshot";
  config: Record<string, unknown>;
  status: "ok" | "warning" | "error";
  messages: string[];
  result: {
    summary?: SummaryPayload;
    snapshots?: SnapshotPayload[];
  } | null;
}

export interface CorpusMeta {
  name: string;
  hash: string;
  n_documents: number;
  created_at: string;
}

export interface CorpusStats {
  name: string;
  hash: string;
  n_documents: number;
  sources: string[];
  date_range: [string, string] | null;
}

export interface KwicSnippet {
  unit_id: string;
  text: string;
  match_start: number;
  match_end: number;
  highlighted: string;
}

export interface DupePair {
  unit_a: string;
  unit_b: string;
  cosine: number;
}
