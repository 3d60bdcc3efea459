import { buildHierarchy, type HierarchyNode } from "../hierarchy.js";
import { clear, el } from "../dom.js";
import type { PermissionRecord, RenderedPermission } from "../types.js";

export interface PermissionsViewHandlers {
  onRemove: (id: string) => void;
  onToggleNaturalLanguage: (enabled: boolean) => void;
}

function grantBadges(
  node: HierarchyNode,
  handlers: PermissionsViewHandlers,
): (Node | string)[] {
  const parts: (Node | string)[] = [];
  for (const grant of node.grants) {
    const badge = el("span", { class: `grant grant-${grant.action}`, "data-id": grant.id }, [
      ` [${grant.action}]`,
    ]);
    if (grant.origin !== "manual") {
      badge.append(el("small", {}, [` (${grant.origin})`]));
    }
    const remove = el("button", { class: "remove", "data-id": grant.id }, ["remove"]);
    remove.addEventListener("click", () => handlers.onRemove(grant.id));
    parts.push(badge, " ", remove);
  }
  return parts;
}

function renderNode(node: HierarchyNode, handlers: PermissionsViewHandlers): HTMLLIElement {
  const item = el("li", { class: "perm-node" }, [
    el("span", { class: "perm-label" }, [node.label]),
    ...grantBadges(node, handlers),
  ]);
  if (node.children.size) {
    const list = el("ul", {});
    for (const child of node.children.values()) list.append(renderNode(child, handlers));
    item.append(list);
  }
  return item;
}

export function renderPermissionsView(
  container: HTMLElement,
  permissions: PermissionRecord[],
  handlers: PermissionsViewHandlers,
): void {
  clear(container);
  const toggle = el("label", { class: "nl-toggle" }, [
    "natural language ",
  ]);
  const checkbox = el("input", { type: "checkbox" });
  checkbox.addEventListener("change", () =>
    handlers.onToggleNaturalLanguage(checkbox.checked),
  );
  toggle.prepend(checkbox);
  container.append(toggle);
  if (!permissions.length) {
    container.append(el("p", { class: "empty" }, ["No active permissions."]));
    return;
  }
  const hierarchy = buildHierarchy(permissions);
  for (const [app, trees] of hierarchy) {
    const section = el("section", { class: "app-perms", "data-app": app });
    section.append(el("h3", {}, [app]));
    for (const [treeName, roots] of trees) {
      const block = el("div", { class: "tree-perms", "data-tree": treeName });
      block.append(el("h4", {}, [treeName]));
      const list = el("ul", {});
      for (const root of roots.values()) list.append(renderNode(root, handlers));
      block.append(list);
      section.append(block);
    }
    container.append(section);
  }
}

export function renderNaturalLanguageView(
  container: HTMLElement,
  rendered: RenderedPermission[],
  handlers: PermissionsViewHandlers,
): void {
  clear(container);
  const toggle = el("label", { class: "nl-toggle" }, ["natural language "]);
  const checkbox = el("input", { type: "checkbox", checked: "checked" });
  checkbox.addEventListener("change", () =>
    handlers.onToggleNaturalLanguage(checkbox.checked),
  );
  toggle.prepend(checkbox);
  container.append(toggle);
  const list = el("ul", { class: "nl-list" });
  for (const entry of rendered) {
    const remove = el("button", { class: "remove", "data-id": entry.id }, ["remove"]);
    remove.addEventListener("click", () => handlers.onRemove(entry.id));
    list.append(el("li", {}, [`${entry.app}: ${entry.text} `, remove]));
  }
  container.append(list);
}
