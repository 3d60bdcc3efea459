import { clear, el } from "../dom.js";
import type { Forest, TreeNode, TreesResponse } from "../types.js";

function renderNode(node: TreeNode): HTMLLIElement {
  const flags: string[] = [];
  if (node.recursive) flags.push("recursive");
  if (node.kind && node.kind !== "enum") flags.push(node.kind);
  const label = el("span", { class: "node-name" }, [node.name]);
  const item = el("li", {}, [label]);
  if (flags.length) {
    item.append(" ", el("small", { class: "node-flags" }, [`(${flags.join(", ")})`]));
  }
  const children = node.children ?? [];
  if (children.length || node.recursive) {
    const list = el("ul", {});
    if (node.recursive) {
      list.append(el("li", { class: "recursive-marker" }, [`${node.name} …`]));
    }
    for (const child of children) list.append(renderNode(child));
    item.append(list);
  }
  return item;
}

function renderForest(app: string, forest: Forest): HTMLElement {
  const section = el("section", { class: "forest", "data-app": app });
  section.append(el("h3", {}, [app]));
  section.append(
    el("p", { class: "actions" }, [`actions: ${forest.actions.join(", ")}`]),
  );
  for (const [treeName, root] of Object.entries(forest.trees)) {
    const tree = el("div", { class: "tree", "data-tree": treeName });
    tree.append(el("h4", {}, [treeName]));
    tree.append(el("ul", {}, [renderNode(root)]));
    section.append(tree);
  }
  return section;
}

export function renderTreesView(container: HTMLElement, trees: TreesResponse): void {
  clear(container);
  for (const [app, forest] of Object.entries(trees)) {
    container.append(renderForest(app, forest));
  }
}
