import { clear, el } from "../dom.js";
import type { AuditRecord, GrantShortcut } from "../types.js";

export interface LogsViewHandlers {
  // receives the verbatim rvs/action strings from the denial record
  onGrant: (shortcut: GrantShortcut) => void;
}

function summarize(record: AuditRecord): string {
  const detail = record.detail;
  switch (record.kind) {
    case "perm_created":
    case "perm_removed":
    case "perm_auto_deployed":
      return `${detail["rvs"] ?? ""} [${detail["action"] ?? ""}]`;
    case "mode_changed":
      return `mode -> ${detail.mode ?? ""}`;
    case "access_allowed":
    case "access_denied":
      return `${detail.endpoint ?? "?"}(${JSON.stringify(detail.args ?? {})})`;
  }
}

/** The unmet (rvs, action) pairs of a denial record, verbatim. */
export function denialShortcuts(record: AuditRecord): GrantShortcut[] {
  if (record.kind !== "access_denied") return [];
  const shortcuts: GrantShortcut[] = [];
  for (const need of record.detail.check?.needs ?? []) {
    if (need.satisfied) continue;
    for (const rvs of need.remaining) {
      shortcuts.push({ app: record.subject, rvs, action: need.action });
    }
  }
  return shortcuts;
}

function renderRow(record: AuditRecord, handlers: LogsViewHandlers): HTMLTableRowElement {
  const row = el("tr", {
    class: record.kind === "access_denied" ? "log-row denied" : "log-row",
    "data-seq": String(record.seq),
    "data-kind": record.kind,
  });
  row.append(
    el("td", {}, [String(record.seq)]),
    el("td", {}, [record.timestamp.replace("T", " ").slice(0, 19)]),
    el("td", { class: "kind" }, [record.kind]),
    el("td", {}, [record.subject]),
    el("td", {}, [record.actor]),
  );
  const summary = el("td", { class: "summary" }, [summarize(record)]);
  for (const shortcut of denialShortcuts(record)) {
    const button = el(
      "button",
      { class: "grant-shortcut", "data-rvs": shortcut.rvs, "data-action": shortcut.action },
      [`grant ${shortcut.action} on ${shortcut.rvs}`],
    );
    button.addEventListener("click", () => handlers.onGrant(shortcut));
    summary.append(" ", button);
  }
  row.append(summary);
  return row;
}

export function renderLogsView(
  container: HTMLElement,
  records: AuditRecord[],
  handlers: LogsViewHandlers,
): void {
  clear(container);
  if (!records.length) {
    container.append(el("p", { class: "empty" }, ["No audit records yet."]));
    return;
  }
  const table = el("table", { class: "logs" });
  const head = el("tr", {});
  for (const title of ["seq", "time", "kind", "app", "actor", "detail"]) {
    head.append(el("th", {}, [title]));
  }
  table.append(head);
  // newest first
  for (const record of [...records].sort((a, b) => b.seq - a.seq)) {
    table.append(renderRow(record, handlers));
  }
  container.append(table);
}
