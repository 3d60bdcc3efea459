import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import type {
  AuditRecord,
  GrantShortcut,
  HandlingMode,
  PendingSuggestion,
  TreesResponse,
} from "./types.js";
import { CreatePermissionForm } from "./views/create.js";
import { denialShortcuts, renderLogsView } from "./views/logs.js";
import { renderModeSelector } from "./views/mode.js";
import {
  renderNaturalLanguageView,
  renderPermissionsView,
} from "./views/permissions.js";
import { renderSuggestions } from "./views/suggestions.js";
import { renderTreesView } from "./views/trees.js";

const TABS = ["trees", "permissions", "create", "logs"] as const;
export type Tab = (typeof TABS)[number];

export class Dashboard {
  tab: Tab = "permissions";
  app = "";
  mode: HandlingMode = "ask";
  naturalLanguage = false;
  records: AuditRecord[] = [];
  pendingSuggestions: PendingSuggestion[] = [];
  private dismissed = new Set<number>();
  private trees: TreesResponse = {};
  private modes = new Map<string, HandlingMode>();
  readonly panels: Record<Tab | "mode" | "suggestions" | "status", HTMLElement>;
  createForm: CreatePermissionForm | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {
    clear(root);
    const nav = el("nav", { class: "tabs" });
    for (const tab of TABS) {
      const button = el("button", { class: "tab", "data-tab": tab }, [tab]);
      button.addEventListener("click", () => void this.showTab(tab));
      nav.append(button);
    }
    this.panels = {
      trees: el("div", { class: "panel panel-trees" }),
      permissions: el("div", { class: "panel panel-permissions" }),
      create: el("div", { class: "panel panel-create" }),
      logs: el("div", { class: "panel panel-logs" }),
      mode: el("div", { class: "panel-mode" }),
      suggestions: el("div", { class: "panel-suggestions" }),
      status: el("p", { class: "status", role: "status" }),
    };
    const appPicker = el("div", { class: "app-picker" });
    this.appSelect = el("select", { class: "app-select" });
    this.appSelect.addEventListener("change", () => {
      void this.selectApp(this.appSelect.value);
    });
    appPicker.append(el("label", {}, ["application ", this.appSelect]));
    root.append(
      el("header", {}, [el("h1", {}, ["Agent permissions"]), appPicker, this.panels.mode]),
      nav,
      this.panels.status,
      this.panels.suggestions,
      this.panels.trees,
      this.panels.permissions,
      this.panels.create,
      this.panels.logs,
    );
  }

  private appSelect: HTMLSelectElement;

  async init(): Promise<void> {
    this.trees = await this.api.trees();
    clear(this.appSelect);
    for (const app of Object.keys(this.trees)) {
      this.appSelect.append(el("option", { value: app }, [app]));
    }
    const first = Object.keys(this.trees)[0] ?? "";
    await this.selectApp(first);
    await this.showTab("permissions");
  }

  async selectApp(app: string): Promise<void> {
    this.app = app;
    this.appSelect.value = app;
    if (app) {
      this.mode = (await this.api.getMode(app)).mode;
      this.modes.set(app, this.mode);
    }
    this.renderMode();
    await this.refreshLogs();
    await this.renderCurrentTab();
  }

  async showTab(tab: Tab): Promise<void> {
    this.tab = tab;
    for (const name of TABS) {
      this.panels[name].style.display = name === tab ? "" : "none";
      this.root
        .querySelector(`.tab[data-tab="${name}"]`)
        ?.classList.toggle("active", name === tab);
    }
    await this.renderCurrentTab();
  }

  private setStatus(message: string): void {
    this.panels.status.textContent = message;
  }

  private async renderCurrentTab(): Promise<void> {
    switch (this.tab) {
      case "trees":
        renderTreesView(this.panels.trees, this.trees);
        break;
      case "permissions":
        await this.refreshPermissions();
        break;
      case "create":
        this.createForm = new CreatePermissionForm(this.panels.create, this.trees, {
          onSubmit: async (app, rvs, action) => {
            const response = await this.api.createPermission({ app, rvs, action });
            this.createForm?.showWarnings(response.warnings.map((w) => w.rvs));
            this.setStatus(`created ${response.id}`);
            await this.refreshPermissions();
          },
        });
        break;
      case "logs":
        await this.refreshLogs();
        renderLogsView(this.panels.logs, this.records, {
          onGrant: (shortcut) => void this.grantShortcut(shortcut),
        });
        break;
    }
    this.renderSuggestionsPanel();
  }

  /** POST the verbatim rvs/action strings carried by a denial record. */
  async grantShortcut(shortcut: GrantShortcut): Promise<void> {
    try {
      const response = await this.api.createPermission(shortcut);
      this.setStatus(`granted ${shortcut.action} on ${shortcut.rvs} (${response.id})`);
    } catch (error) {
      this.setStatus(error instanceof ApiError ? error.message : String(error));
      return;
    }
    await this.refreshLogs();
    await this.renderCurrentTab();
  }

  async refreshPermissions(): Promise<void> {
    const handlers = {
      onRemove: async (id: string) => {
        await this.api.deletePermission(id);
        await this.refreshPermissions();
      },
      onToggleNaturalLanguage: async (enabled: boolean) => {
        this.naturalLanguage = enabled;
        await this.refreshPermissions();
      },
    };
    if (this.naturalLanguage) {
      const rendered = await this.api.renderedPermissions();
      renderNaturalLanguageView(this.panels.permissions, rendered, {
        onRemove: (id) => void handlers.onRemove(id),
        onToggleNaturalLanguage: (enabled) =>
          void handlers.onToggleNaturalLanguage(enabled),
      });
    } else {
      const permissions = await this.api.permissions();
      renderPermissionsView(this.panels.permissions, permissions, {
        onRemove: (id) => void handlers.onRemove(id),
        onToggleNaturalLanguage: (enabled) =>
          void handlers.onToggleNaturalLanguage(enabled),
      });
    }
  }

  /** Poll the log tail; infer-mode denials become pending suggestions. */
  async refreshLogs(): Promise<void> {
    const after = this.records.length ? this.records[this.records.length - 1].seq : undefined;
    const fresh = await this.api.logs(after !== undefined ? { after_seq: after } : {});
    for (const record of fresh) {
      this.records.push(record);
      if (
        record.kind === "access_denied" &&
        !record.detail.failed &&
        this.modes.get(record.subject) === "infer"
      ) {
        const pairs = denialShortcuts(record);
        if (pairs.length) {
          this.pendingSuggestions.push({
            seq: record.seq,
            app: record.subject,
            endpoint: String(record.detail.endpoint ?? "?"),
            pairs,
          });
        }
      }
    }
    if (this.tab === "logs" && fresh.length) {
      renderLogsView(this.panels.logs, this.records, {
        onGrant: (shortcut) => void this.grantShortcut(shortcut),
      });
    }
  }

  private renderSuggestionsPanel(): void {
    const visible = this.pendingSuggestions.filter((s) => !this.dismissed.has(s.seq));
    renderSuggestions(this.panels.suggestions, visible, {
      onApprove: (suggestion) => void this.approveSuggestion(suggestion),
      onDismiss: (suggestion) => {
        this.dismissed.add(suggestion.seq);
        this.renderSuggestionsPanel();
      },
    });
  }

  async approveSuggestion(suggestion: PendingSuggestion): Promise<void> {
    for (const pair of suggestion.pairs) {
      await this.api.createPermission(pair);
    }
    this.dismissed.add(suggestion.seq);
    this.setStatus(`approved suggestions from denial #${suggestion.seq}`);
    await this.renderCurrentTab();
  }

  private renderMode(): void {
    renderModeSelector(this.panels.mode, this.mode, {
      onChange: (mode) => {
        void this.api.setMode(this.app, mode).then((response) => {
          this.mode = response.mode;
          this.modes.set(this.app, response.mode);
          this.renderMode();
        });
      },
    });
  }

  startPolling(intervalMs = 2500): number {
    return window.setInterval(() => void this.refreshLogs(), intervalMs);
  }
}
