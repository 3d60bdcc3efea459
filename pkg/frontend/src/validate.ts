import type { Forest, TreeNode } from "./types.js";

// Client-side structural checks for the create form. The server is the
// authority; this only stops obviously malformed submissions before any
// request leaves the browser.

export interface PathProblem {
  index: number;
  message: string;
}

function childNamed(node: TreeNode, name: string): TreeNode | null {
  if (node.recursive && name === node.name) return node;
  for (const child of node.children ?? []) {
    if (child.name === name) return child;
  }
  return null;
}

/**
 * Check that nodePath is a root-anchored path of the named tree, with no
 * skipped levels. Returns null when fine, else the first problem.
 */
export function validatePath(
  forest: Forest,
  treeName: string,
  nodePath: string[],
): PathProblem | null {
  const tree = forest.trees[treeName];
  if (!tree) return { index: 0, message: `unknown tree ${treeName}` };
  if (nodePath.length === 0) return { index: 0, message: "empty path" };
  if (nodePath[0] !== tree.name) {
    return { index: 0, message: `${nodePath[0]} is not the root of ${treeName}` };
  }
  let node = tree;
  for (let i = 1; i < nodePath.length; i++) {
    const next = childNamed(node, nodePath[i]);
    if (!next) {
      return {
        index: i,
        message: `${nodePath[i]} is not a child of ${node.name} (level skipped?)`,
      };
    }
    node = next;
  }
  return null;
}

export interface ValueProblem {
  index: number;
  message: string;
}

/** Every segment needs a value; `?` is the wildcard; `)` cannot appear. */
export function validateValues(values: string[]): ValueProblem | null {
  for (let i = 0; i < values.length; i++) {
    const value = values[i];
    if (value.trim() === "") {
      return { index: i, message: "value is required (use ? for the wildcard)" };
    }
    if (value.includes(")")) {
      return { index: i, message: "value may not contain ')'" };
    }
  }
  return null;
}

/** Render the textual spec the server expects. */
export function buildRvsText(
  treeName: string,
  nodePath: string[],
  values: string[],
): string {
  return nodePath
    .map((node, i) => `${i === 0 ? `${treeName}:` : ""}${node}(${values[i]})`)
    .join("::");
}
