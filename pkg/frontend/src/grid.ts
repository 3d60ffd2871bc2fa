/**
 * View models and DOM renderers for summaries, snapshot grids, the
 * run diff, and phrase-in-context panels.  Model construction is pure
 * (and unit-tested); renderers only lay the models out and attach the
 * click handlers for the explore loop (inspect context, ban, rerun).
 */

import type { PhraseDiff } from "./diff";
import type { KwicSnippet, SnapshotPayload, SummaryPayload } from "./types";

export interface GridColumn {
  name: string;
  nUnits: number;
  nPositive: number;
  error: string | null;
}

export interface GridRow {
  phrase: string;
  /** rank of the phrase per window, null where absent */
  ranks: Array<number | null>;
}

export interface GridModel {
  columns: GridColumn[];
  rows: GridRow[];
}

export function buildGridModel(snapshots: SnapshotPayload[]): GridModel {
  const columns: GridColumn[] = snapshots.map((snapshot) => ({
    name: snapshot.window.name,
    nUnits: snapshot.n_units,
    nPositive: snapshot.n_positive,
    error: snapshot.error,
  }));
  const ranks = new Map<string, Array<number | null>>();
  snapshots.forEach((snapshot, column) => {
    if (!snapshot.summary) {
      return;
    }
    snapshot.summary.phrases.forEach((entry, index) => {
      let row = ranks.get(entry.phrase);
      if (!row) {
        row = new Array(snapshots.length).fill(null);
        ranks.set(entry.phrase, row);
      }
      row[column] = index + 1;
    });
  });
  const rows = [...ranks.entries()]
    .map(([phrase, phraseRanks]) => ({ phrase, ranks: phraseRanks }))
    .sort((a, b) => {
      const bestA = Math.min(...a.ranks.map((r) => r ?? Infinity));
      const bestB = Math.min(...b.ranks.map((r) => r ?? Infinity));
      return bestA - bestB || a.phrase.localeCompare(b.phrase);
    });
  return { columns, rows };
}

export interface PhraseHandlers {
  onInspect?: (phrase: string) => void;
  onBan?: (phrase: string) => void;
}

function phraseCell(phrase: string, handlers: PhraseHandlers): HTMLElement {
  const cell = document.createElement("span");
  cell.className = "phrase";
  const label = document.createElement("a");
  label.textContent = phrase;
  label.href = "#";
  label.title = "show this phrase in context";
  label.addEventListener("click", (event) => {
    event.preventDefault();
    handlers.onInspect?.(phrase);
  });
  cell.appendChild(label);
  if (handlers.onBan) {
    const ban = document.createElement("button");
    ban.className = "ban";
    ban.textContent = "ban";
    ban.title = "ban this phrase and rerun";
    ban.addEventListener("click", () => handlers.onBan?.(phrase));
    cell.appendChild(ban);
  }
  return cell;
}

export function renderSummary(
  summary: SummaryPayload,
  handlers: PhraseHandlers = {},
): HTMLElement {
  const container = document.createElement("div");
  container.className = "summary";
  const heading = document.createElement("div");
  heading.className = "summary-meta";
  const lambda = summary.lambda === null ? "" : ` lambda=${summary.lambda.toPrecision(4)}`;
  heading.textContent =
    `${summary.method} / ${summary.scheme ?? "?"} / ${summary.unit_kind ?? "?"} / ` +
    `${summary.rule ?? "?"} (+${summary.n_pos} / -${summary.n_neg})${lambda}`;
  container.appendChild(heading);
  if (summary.warning) {
    const warning = document.createElement("div");
    warning.className = "warning";
    warning.textContent = summary.warning;
    container.appendChild(warning);
  }
  const list = document.createElement("ol");
  list.className = "summary-phrases";
  for (const entry of summary.phrases) {
    const item = document.createElement("li");
    item.appendChild(phraseCell(entry.phrase, handlers));
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = entry.score.toPrecision(3);
    item.appendChild(score);
    list.appendChild(item);
  }
  container.appendChild(list);
  return container;
}

export function renderGrid(model: GridModel, handlers: PhraseHandlers = {}): HTMLElement {
  const table = document.createElement("table");
  table.className = "snapshot-grid";
  const head = table.createTHead();
  const headRow = head.insertRow();
  headRow.appendChild(document.createElement("th"));
  for (const column of model.columns) {
    const cell = document.createElement("th");
    cell.textContent = column.name;
    if (column.error) {
      cell.classList.add("errored");
      cell.title = column.error;
    } else {
      cell.title = `${column.nPositive}/${column.nUnits} positive units`;
    }
    headRow.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of model.rows) {
    const tr = body.insertRow();
    const label = document.createElement("th");
    label.appendChild(phraseCell(row.phrase, handlers));
    tr.appendChild(label);
    for (const rank of row.ranks) {
      const cell = tr.insertCell();
      cell.textContent = rank === null ? "" : String(rank);
      if (rank !== null) {
        cell.className = "present";
      }
    }
  }
  return table;
}

export function renderDiff(diff: PhraseDiff): HTMLElement {
  const container = document.createElement("div");
  container.className = "run-diff";
  const section = (label: string, phrases: string[], className: string) => {
    const block = document.createElement("div");
    block.className = `diff-${className}`;
    const title = document.createElement("strong");
    title.textContent = `${label} (${phrases.length})`;
    block.appendChild(title);
    const list = document.createElement("span");
    list.textContent = phrases.length ? ` ${phrases.join(", ")}` : " none";
    block.appendChild(list);
    return block;
  };
  container.appendChild(section("entering", diff.entering, "entering"));
  container.appendChild(section("leaving", diff.leaving, "leaving"));
  return container;
}

export function renderKwic(phrase: string, snippets: KwicSnippet[]): HTMLElement {
  const container = document.createElement("div");
  container.className = "kwic";
  const title = document.createElement("h3");
  title.textContent = `"${phrase}" in context`;
  container.appendChild(title);
  if (!snippets.length) {
    const empty = document.createElement("p");
    empty.textContent = "no occurrences";
    container.appendChild(empty);
    return container;
  }
  const list = document.createElement("ul");
  for (const snippet of snippets) {
    const item = document.createElement("li");
    const before = document.createTextNode(`…${snippet.text.slice(0, snippet.match_start)}`);
    const match = document.createElement("mark");
    match.textContent = snippet.text.slice(snippet.match_start, snippet.match_end);
    const after = document.createTextNode(`${snippet.text.slice(snippet.match_end)}… `);
    const source = document.createElement("small");
    source.textContent = `[${snippet.unit_id}]`;
    item.append(before, match, after, source);
    list.appendChild(item);
  }
  container.appendChild(list);
  return container;
}
