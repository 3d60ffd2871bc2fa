/**
 * Explorer shell: corpus picker, query editor, run/rerun loop with
 * history, the snapshot grid, the entering/leaving diff, and the
 * phrase-context panel.  All analysis happens server-side; the page
 * state mirrors the URL hash so views are shareable.
 */

import { ApiClient, ApiError } from "./api";
import { diffPhrases, runPhrases } from "./diff";
import { buildGridModel, renderDiff, renderGrid, renderKwic, renderSummary } from "./grid";
import {
  SessionState,
  decodeState,
  defaultState,
  encodeState,
  lastRunId,
  previousRunId,
  toSummaryRequest,
  withBan,
  withRun,
  withTerm,
} from "./state";
import type { RunRecord } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  Object.assign(node, props);
  node.append(...children);
  return node;
}

export class ExplorerApp {
  private state: SessionState;
  private records = new Map<string, RunRecord>();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {
    this.state = window.location.hash.length > 1
      ? decodeState(window.location.hash)
      : defaultState();
  }

  async start(): Promise<void> {
    await this.refreshCorpora();
    for (const entry of this.state.history) {
      try {
        this.records.set(entry.runId, await this.api.getRun(entry.runId));
      } catch {
        // runs from another store are simply not shown
      }
    }
    this.render();
  }

  private setState(state: SessionState): void {
    this.state = state;
    window.location.hash = encodeState(state);
    this.render();
  }

  private async refreshCorpora(): Promise<void> {
    const corpora = await this.api.listCorpora();
    if (!this.state.corpus && corpora.length) {
      this.state.corpus = corpora[0].name;
    }
    this.corpora = corpora.map((c) => c.name);
  }

  private corpora: string[] = [];

  private async run(): Promise<void> {
    if (!this.state.corpus || !this.state.terms.length) {
      this.flash("pick a corpus and add at least one query term");
      return;
    }
    const request = toSummaryRequest(this.state);
    try {
      const submission = this.state.windows.length
        ? await this.api.submitSnapshot(this.state.corpus, {
            ...request,
            windows: this.state.windows,
          })
        : await this.api.submitSummary(this.state.corpus, request);
      this.records.set(submission.record.run_id, submission.record);
      this.setState(
        withRun(this.state, { runId: submission.record.run_id, cached: submission.cached }),
      );
    } catch (error) {
      this.flash(error instanceof ApiError ? `${error.code}: ${error.message}` : String(error));
    }
  }

  private async banAndRerun(phrase: string): Promise<void> {
    this.state = withBan(this.state, phrase);
    await this.run();
  }

  private async inspect(phrase: string): Promise<void> {
    if (!this.state.corpus) {
      return;
    }
    const payload = await this.api.kwic(this.state.corpus, phrase);
    const panel = this.root.querySelector("#kwic-panel");
    if (panel) {
      panel.replaceChildren(renderKwic(phrase, payload.snippets));
    }
  }

  private flash(message: string): void {
    const banner = this.root.querySelector("#flash");
    if (banner) {
      banner.textContent = message;
    }
  }

  private controls(): HTMLElement {
    const corpusSelect = el("select", { id: "corpus" });
    for (const name of this.corpora) {
      corpusSelect.appendChild(el("option", { value: name, selected: name === this.state.corpus }, name));
    }
    corpusSelect.addEventListener("change", () => {
      this.setState({ ...this.state, corpus: corpusSelect.value });
    });

    const termInput = el("input", { placeholder: "add query term", id: "term-input" });
    termInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && termInput.value.trim()) {
        this.setState(withTerm(this.state, termInput.value));
        termInput.value = "";
      }
    });

    const termChips = el("span", { className: "chips" });
    for (const term of this.state.terms) {
      const chip = el("span", { className: "chip" }, term);
      const remove = el("button", {}, "x");
      remove.addEventListener("click", () => {
        this.setState({ ...this.state, terms: this.state.terms.filter((t) => t !== term) });
      });
      chip.appendChild(remove);
      termChips.appendChild(chip);
    }

    const banChips = el("span", { className: "chips banned" });
    for (const phrase of this.state.ban) {
      const chip = el("span", { className: "chip" }, phrase);
      const remove = el("button", {}, "x");
      remove.addEventListener("click", () => {
        this.setState({ ...this.state, ban: this.state.ban.filter((b) => b !== phrase) });
      });
      chip.appendChild(remove);
      banChips.appendChild(chip);
    }

    const methodSelect = el("select", { id: "method" });
    for (const method of ["lasso", "l1lr", "correlation", "cooccurrence"] as const) {
      methodSelect.appendChild(
        el("option", { value: method, selected: method === this.state.selector.method }, method),
      );
    }
    methodSelect.addEventListener("change", () => {
      this.setState({
        ...this.state,
        selector: { ...this.state.selector, method: methodSelect.value as never },
      });
    });

    const kInput = el("input", {
      id: "k",
      type: "number",
      min: "1",
      value: String(this.state.selector.k),
    });
    kInput.addEventListener("change", () => {
      const k = Math.max(1, Number(kInput.value) || 15);
      this.setState({ ...this.state, selector: { ...this.state.selector, k } });
    });

    const runButton = el("button", { id: "run" }, "run");
    runButton.addEventListener("click", () => void this.run());

    return el(
      "div",
      { className: "controls" },
      el("label", {}, "corpus ", corpusSelect),
      el("label", {}, "terms ", termInput),
      termChips,
      el("label", {}, "banned "),
      banChips,
      el("label", {}, "method ", methodSelect),
      el("label", {}, "k ", kInput),
      runButton,
      el("span", { id: "flash" }),
    );
  }

  private results(): HTMLElement {
    const container = el("div", { className: "results" });
    const currentId = lastRunId(this.state);
    if (!currentId) {
      container.appendChild(el("p", {}, "no runs yet"));
      return container;
    }
    const record = this.records.get(currentId);
    if (!record) {
      container.appendChild(el("p", {}, `run ${currentId} not loaded`));
      return container;
    }

    const handlers = {
      onInspect: (phrase: string) => void this.inspect(phrase),
      onBan: (phrase: string) => void this.banAndRerun(phrase),
    };

    if (record.result?.snapshots) {
      container.appendChild(renderGrid(buildGridModel(record.result.snapshots), handlers));
    } else if (record.result?.summary) {
      container.appendChild(renderSummary(record.result.summary, handlers));
    } else {
      container.appendChild(el("p", { className: "warning" }, record.messages.join("; ")));
    }

    const previousId = previousRunId(this.state);
    const previous = previousId ? this.records.get(previousId) : null;
    if (previous) {
      container.appendChild(
        renderDiff(diffPhrases(runPhrases(previous), runPhrases(record))),
      );
    }
    container.appendChild(el("div", { id: "kwic-panel" }));
    return container;
  }

  private history(): HTMLElement {
    const list = el("ul", { className: "history" });
    for (const entry of [...this.state.history].reverse()) {
      const record = this.records.get(entry.runId);
      const label = record
        ? `${entry.runId} · ${record.kind} · ${record.status}`
        : entry.runId;
      const item = el("li", {}, label);
      if (entry.cached) {
        item.appendChild(el("span", { className: "badge" }, " cache hit"));
      }
      list.appendChild(item);
    }
    return el("div", { className: "history-panel" }, el("h3", {}, "runs"), list);
  }

  render(): void {
    this.root.replaceChildren(this.controls(), this.results(), this.history());
  }
}

export function mount(root: HTMLElement, baseUrl = ""): ExplorerApp {
  const app = new ExplorerApp(new ApiClient(baseUrl), root);
  void app.start();
  return app;
}
