/**
 * Typed client for the summarization service.  Submissions report
 * whether the server answered from its run cache (HTTP 200) or
 * executed a fresh run (201), so the UI can badge cache hits.
 */

import type {
  CorpusMeta,
  CorpusStats,
  DupePair,
  KwicSnippet,
  QueryConfig,
  RuleConfig,
  RunRecord,
  Scheme,
  SelectorSettings,
  UnitKind,
  WindowSpec,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SummaryRequest {
  query: QueryConfig;
  rule: RuleConfig;
  unit_kind: UnitKind;
  scheme: Scheme;
  selector: SelectorSettings;
  ngram_range: [number, number];
  min_df: number | null;
}

export interface SnapshotRequest extends SummaryRequest {
  windows: WindowSpec[];
}

export interface Submission {
  record: RunRecord;
  cached: boolean;
}

async function parseError(response: Response): Promise<ApiError> {
  let code = `HTTP${response.status}`;
  let message = response.statusText;
  try {
    const payload = await response.json();
    if (payload?.error) {
      code = payload.error.code ?? code;
      message = payload.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json() as Promise<T>;
  }

  listCorpora(): Promise<CorpusMeta[]> {
    return this.request("/corpora");
  }

  uploadCorpus(name: string, jsonl: string): Promise<CorpusMeta> {
    return this.request("/corpora", {
      method: "POST",
      body: JSON.stringify({ name, jsonl }),
    });
  }

  corpusStats(name: string): Promise<CorpusStats> {
    return this.request(`/corpora/${encodeURIComponent(name)}/stats`);
  }

  private async submit(path: string, body: unknown): Promise<Submission> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    const record = (await response.json()) as RunRecord;
    return { record, cached: response.status === 200 };
  }

  submitSummary(corpus: string, body: SummaryRequest): Promise<Submission> {
    return this.submit(`/corpora/${encodeURIComponent(corpus)}/summaries`, body);
  }

  submitSnapshot(corpus: string, body: SnapshotRequest): Promise<Submission> {
    return this.submit(`/corpora/${encodeURIComponent(corpus)}/snapshots`, body);
  }

  listRuns(): Promise<Array<Pick<RunRecord, "run_id" | "created_at" | "corpus" | "kind" | "status">>> {
    return this.request("/runs");
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request(`/runs/${encodeURIComponent(runId)}`);
  }

  kwic(
    corpus: string,
    phrase: string,
    limit = 8,
    seed = 0,
  ): Promise<{ phrase: string; snippets: KwicSnippet[] }> {
    const params = new URLSearchParams({
      phrase,
      limit: String(limit),
      seed: String(seed),
    });
    return this.request(`/corpora/${encodeURIComponent(corpus)}/kwic?${params}`);
  }

  dupes(
    corpus: string,
    threshold = 0.95,
  ): Promise<{ threshold: number; n_pairs: number; pairs: DupePair[] }> {
    const params = new URLSearchParams({ threshold: String(threshold) });
    return this.request(`/corpora/${encodeURIComponent(corpus)}/dupes?${params}`);
  }
}
