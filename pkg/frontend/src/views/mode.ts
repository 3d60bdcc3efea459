import { clear, el } from "../dom.js";
import type { HandlingMode } from "../types.js";

const MODES: HandlingMode[] = ["ask", "skip", "infer", "yolo"];

export interface ModeSelectorHandlers {
  onChange: (mode: HandlingMode) => void;
}

export function renderModeSelector(
  container: HTMLElement,
  current: HandlingMode,
  handlers: ModeSelectorHandlers,
): void {
  clear(container);
  const select = el("select", { class: "mode-select" });
  for (const mode of MODES) {
    const option = el("option", { value: mode }, [mode]);
    if (mode === current) option.setAttribute("selected", "selected");
    select.append(option);
  }
  select.value = current;
  select.addEventListener("change", () =>
    handlers.onChange(select.value as HandlingMode),
  );
  container.append(el("label", {}, ["handling mode ", select]));
  if (current === "yolo") {
    container.append(
      el("p", { class: "mode-warning" }, [
        "yolo auto-deploys permissions; only auditing protects you",
      ]),
    );
  }
}
