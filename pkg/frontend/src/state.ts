/**
 * Session state: the working configuration plus the run history of
 * this browser session.  The state round-trips through the URL hash so
 * any view is shareable; analysis results themselves always come from
 * run records, never from client-side computation.
 */

import type { SummaryRequest } from "./api";
import type { RuleConfig, Scheme, SelectorSettings, UnitKind, WindowSpec } from "./types";

export interface HistoryEntry {
  runId: string;
  cached: boolean;
}

export interface SessionState {
  corpus: string | null;
  topic: string;
  terms: string[];
  ban: string[];
  rule: RuleConfig;
  unitKind: UnitKind;
  scheme: Scheme;
  selector: SelectorSettings;
  ngramRange: [number, number];
  minDf: number | null;
  windows: WindowSpec[];
  history: HistoryEntry[];
}

export function defaultState(): SessionState {
  return {
    corpus: null,
    topic: "",
    terms: [],
    ban: [],
    rule: { kind: "count", k: 1 },
    unitKind: "article",
    scheme: "l2",
    selector: { method: "lasso", k: 15 },
    ngramRange: [1, 3],
    minDf: null,
    windows: [],
    history: [],
  };
}

export function toSummaryRequest(state: SessionState): SummaryRequest {
  return {
    query: { topic: state.topic || state.terms[0] || "", terms: state.terms, ban: state.ban },
    rule: state.rule,
    unit_kind: state.unitKind,
    scheme: state.scheme,
    selector: state.selector,
    ngram_range: state.ngramRange,
    min_df: state.minDf,
  };
}

export function withTerm(state: SessionState, term: string): SessionState {
  const cleaned = term.trim().toLowerCase();
  if (!cleaned || state.terms.includes(cleaned)) {
    return state;
  }
  return { ...state, terms: [...state.terms, cleaned] };
}

export function withoutTerm(state: SessionState, term: string): SessionState {
  return { ...state, terms: state.terms.filter((t) => t !== term) };
}

export function withBan(state: SessionState, phrase: string): SessionState {
  const cleaned = phrase.trim().toLowerCase();
  if (!cleaned || state.ban.includes(cleaned)) {
    return state;
  }
  return { ...state, ban: [...state.ban, cleaned] };
}

export function withoutBan(state: SessionState, phrase: string): SessionState {
  return { ...state, ban: state.ban.filter((b) => b !== phrase) };
}

export function withRun(state: SessionState, entry: HistoryEntry): SessionState {
  const history = state.history.filter((h) => h.runId !== entry.runId);
  return { ...state, history: [...history, entry] };
}

export function lastRunId(state: SessionState): string | null {
  return state.history.length ? state.history[state.history.length - 1].runId : null;
}

export function previousRunId(state: SessionState): string | null {
  return state.history.length > 1 ? state.history[state.history.length - 2].runId : null;
}

/** Serialize into URL-hash parameters; history keeps only run ids. */
export function encodeState(state: SessionState): string {
  const params = new URLSearchParams();
  if (state.corpus) params.set("corpus", state.corpus);
  if (state.topic) params.set("topic", state.topic);
  if (state.terms.length) params.set("terms", state.terms.join(","));
  if (state.ban.length) params.set("ban", state.ban.join(","));
  params.set("rule", `${state.rule.kind}:${state.rule.k}`);
  params.set("unit", state.unitKind);
  params.set("scheme", state.scheme);
  params.set("method", state.selector.method);
  params.set("k", String(state.selector.k));
  params.set("ngram", state.ngramRange.join("-"));
  if (state.minDf !== null) params.set("min_df", String(state.minDf));
  if (state.windows.length) {
    params.set(
      "windows",
      state.windows.map((w) => `${w.name}=${w.start}..${w.end}`).join(";"),
    );
  }
  if (state.history.length) {
    params.set("runs", state.history.map((h) => (h.cached ? `${h.runId}!` : h.runId)).join(","));
  }
  return params.toString();
}

export function decodeState(encoded: string): SessionState {
  const params = new URLSearchParams(encoded.replace(/^#/, ""));
  const state = defaultState();
  state.corpus = params.get("corpus");
  state.topic = params.get("topic") ?? "";
  state.terms = (params.get("terms") ?? "").split(",").filter(Boolean);
  state.ban = (params.get("ban") ?? "").split(",").filter(Boolean);
  const rule = params.get("rule");
  if (rule) {
    const [kind, k] = rule.split(":");
    if (kind === "count" || kind === "hcount") {
      state.rule = { kind, k: Number(k) || 1 };
    }
  }
  const unit = params.get("unit");
  if (unit === "article" || unit === "paragraph" || unit === "headline") {
    state.unitKind = unit;
  }
  const scheme = params.get("scheme");
  if (scheme === "raw" || scheme === "stopword" || scheme === "l2" || scheme === "tfidf") {
    state.scheme = scheme;
  }
  const method = params.get("method");
  if (
    method === "cooccurrence" ||
    method === "correlation" ||
    method === "lasso" ||
    method === "l1lr"
  ) {
    state.selector.method = method;
  }
  const k = Number(params.get("k"));
  if (Number.isFinite(k) && k >= 1) {
    state.selector.k = k;
  }
  const ngram = params.get("ngram");
  if (ngram && /^\d+-\d+$/.test(ngram)) {
    const [lo, hi] = ngram.split("-").map(Number);
    state.ngramRange = [lo, hi];
  }
  const minDf = params.get("min_df");
  state.minDf = minDf === null ? null : Number(minDf);
  const windows = params.get("windows");
  if (windows) {
    state.windows = windows
      .split(";")
      .map((chunk) => {
        const [name, span] = chunk.split("=");
        const [start, end] = (span ?? "").split("..");
        return { name, start, end };
      })
      .filter((w) => w.name && w.start && w.end);
  }
  const runs = params.get("runs");
  if (runs) {
    state.history = runs
      .split(",")
      .filter(Boolean)
      .map((token) =>
        token.endsWith("!")
          ? { runId: token.slice(0, -1), cached: true }
          : { runId: token, cached: false },
      );
  }
  return state;
}
