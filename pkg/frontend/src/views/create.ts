import { clear, el } from "../dom.js";
import type { Forest, TreeNode, TreesResponse } from "../types.js";
import { buildRvsText, validatePath, validateValues } from "../validate.js";

export interface CreateFormHandlers {
  // called only after client-side validation passes
  onSubmit: (app: string, rvs: string, action: string) => Promise<void>;
}

interface Level {
  select: HTMLSelectElement;
  value: HTMLInputElement;
}

function nodeAt(forest: Forest, treeName: string, path: string[]): TreeNode | null {
  let node: TreeNode | undefined = forest.trees[treeName];
  if (!node || node.name !== path[0]) return node ?? null;
  for (const name of path.slice(1)) {
    const children: TreeNode[] = node.children ?? [];
    let next: TreeNode | undefined = children.find((c) => c.name === name);
    if (!next && node.recursive && name === node.name) next = node;
    if (!next) return null;
    node = next;
  }
  return node;
}

export class CreatePermissionForm {
  private app = "";
  private treeName = "";
  private levels: Level[] = [];
  readonly error: HTMLElement;
  readonly warningBanner: HTMLElement;
  private readonly pathContainer: HTMLElement;
  private readonly appSelect: HTMLSelectElement;
  private readonly treeSelect: HTMLSelectElement;
  private readonly actionSelect: HTMLSelectElement;
  readonly form: HTMLFormElement;

  constructor(
    container: HTMLElement,
    private readonly trees: TreesResponse,
    private readonly handlers: CreateFormHandlers,
  ) {
    clear(container);
    this.error = el("p", { class: "form-error", role: "alert" });
    this.warningBanner = el("p", { class: "warning-banner" });
    this.appSelect = el("select", { name: "app" });
    this.treeSelect = el("select", { name: "tree" });
    this.actionSelect = el("select", { name: "action" });
    this.pathContainer = el("div", { class: "path-levels" });
    this.form = el("form", { class: "create-form" });
    this.form.append(
      el("label", {}, ["application ", this.appSelect]),
      el("label", {}, ["tree ", this.treeSelect]),
      this.pathContainer,
      el("label", {}, ["action ", this.actionSelect]),
      el("button", { type: "submit" }, ["create permission"]),
      this.error,
      this.warningBanner,
    );
    container.append(this.form);

    for (const app of Object.keys(trees)) {
      this.appSelect.append(el("option", { value: app }, [app]));
    }
    this.appSelect.addEventListener("change", () => this.setApp(this.appSelect.value));
    this.treeSelect.addEventListener("change", () => this.setTree(this.treeSelect.value));
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    const first = Object.keys(trees)[0];
    if (first) this.setApp(first);
  }

  private forest(): Forest {
    return this.trees[this.app];
  }

  setApp(app: string): void {
    this.app = app;
    this.appSelect.value = app;
    clear(this.treeSelect);
    clear(this.actionSelect);
    for (const treeName of Object.keys(this.forest().trees)) {
      this.treeSelect.append(el("option", { value: treeName }, [treeName]));
    }
    for (const action of this.forest().actions) {
      this.actionSelect.append(el("option", { value: action }, [action]));
    }
    this.setTree(Object.keys(this.forest().trees)[0]);
  }

  setTree(treeName: string): void {
    this.treeName = treeName;
    this.treeSelect.value = treeName;
    this.levels = [];
    clear(this.pathContainer);
    this.addLevel([this.forest().trees[treeName].name]);
  }

  /** Current node-name path, ignoring levels left at "(stop)". */
  nodePath(): string[] {
    const path: string[] = [];
    for (const level of this.levels) {
      if (!level.select.value) break;
      path.push(level.select.value);
    }
    return path;
  }

  values(): string[] {
    return this.levels.slice(0, this.nodePath().length).map((l) => l.value.value);
  }

  private addLevel(options: string[]): void {
    const select = el("select", { class: "node-select" });
    if (this.levels.length > 0) {
      select.append(el("option", { value: "" }, ["(stop)"]));
    }
    for (const name of options) {
      select.append(el("option", { value: name }, [name]));
    }
    const value = el("input", {
      class: "value-input",
      placeholder: "value or ?",
    });
    select.addEventListener("change", () => {
      this.truncateAfter(select);
      this.extendFrom(select);
    });
    this.levels.push({ select, value });
    this.pathContainer.append(
      el("div", { class: "level" }, [select, " = ", value]),
    );
    if (this.levels.length === 1) this.extendFrom(select);
  }

  private truncateAfter(select: HTMLSelectElement): void {
    const index = this.levels.findIndex((l) => l.select === select);
    this.levels = this.levels.slice(0, index + 1);
    while (this.pathContainer.children.length > this.levels.length) {
      this.pathContainer.lastChild?.remove();
    }
  }

  private extendFrom(select: HTMLSelectElement): void {
    if (!select.value) return;
    const node = nodeAt(this.forest(), this.treeName, this.nodePath());
    if (!node) return;
    const childNames = (node.children ?? []).map((c) => c.name);
    if (node.recursive) childNames.push(node.name);
    if (childNames.length) this.addLevel(childNames);
  }

  showError(message: string): void {
    this.error.textContent = message;
  }

  async submit(): Promise<void> {
    this.error.textContent = "";
    this.warningBanner.textContent = "";
    const path = this.nodePath();
    const values = this.values();
    const pathProblem = validatePath(this.forest(), this.treeName, path);
    if (pathProblem) {
      this.showError(pathProblem.message);
      return;
    }
    const valueProblem = validateValues(values);
    if (valueProblem) {
      this.showError(
        `${path[valueProblem.index]}: ${valueProblem.message}`,
      );
      return;
    }
    const rvs = buildRvsText(this.treeName, path, values);
    try {
      await this.handlers.onSubmit(this.app, rvs, this.actionSelect.value);
    } catch (error) {
      this.showError(error instanceof Error ? error.message : String(error));
    }
  }

  showWarnings(warnings: string[]): void {
    this.warningBanner.textContent = warnings.length
      ? `Redundant: already covered by ${warnings.join("; ")}`
      : "";
  }
}
