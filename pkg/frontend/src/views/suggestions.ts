import { clear, el } from "../dom.js";
import type { PendingSuggestion } from "../types.js";

export interface SuggestionsHandlers {
  onApprove: (suggestion: PendingSuggestion) => void;
  onDismiss: (suggestion: PendingSuggestion) => void;
}

export function renderSuggestions(
  container: HTMLElement,
  pending: PendingSuggestion[],
  handlers: SuggestionsHandlers,
): void {
  clear(container);
  if (!pending.length) {
    container.append(el("p", { class: "empty" }, ["No pending suggestions."]));
    return;
  }
  const list = el("ul", { class: "suggestions" });
  for (const suggestion of pending) {
    const approve = el("button", { class: "approve" }, ["approve"]);
    approve.addEventListener("click", () => handlers.onApprove(suggestion));
    const dismiss = el("button", { class: "dismiss" }, ["dismiss"]);
    dismiss.addEventListener("click", () => handlers.onDismiss(suggestion));
    const pairs = suggestion.pairs
      .map((p) => `${p.action} on ${p.rvs}`)
      .join(", ");
    list.append(
      el("li", { class: "suggestion", "data-seq": String(suggestion.seq) }, [
        `${suggestion.app} / ${suggestion.endpoint}: ${pairs} `,
        approve,
        " ",
        dismiss,
      ]),
    );
  }
  container.append(list);
}
