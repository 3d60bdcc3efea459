import { parseRvsText, segmentLabel } from "./rvs.js";
import type { PermissionRecord } from "./types.js";

// Group active permissions app -> tree -> nested path, with each grant
// attached to the node where its spec ends. Display structure only.

export interface HierarchyNode {
  label: string;
  grants: PermissionRecord[];
  children: Map<string, HierarchyNode>;
}

// app -> tree name -> root label -> node
export type Hierarchy = Map<string, Map<string, Map<string, HierarchyNode>>>;

export function buildHierarchy(permissions: PermissionRecord[]): Hierarchy {
  const apps: Hierarchy = new Map();
  for (const permission of permissions) {
    const parsed = parseRvsText(permission.rvs);
    const treeName = parsed.tree ?? parsed.segments[0].node;
    let trees = apps.get(permission.app);
    if (!trees) {
      trees = new Map();
      apps.set(permission.app, trees);
    }
    let level = trees.get(treeName);
    if (!level) {
      level = new Map();
      trees.set(treeName, level);
    }
    let node: HierarchyNode | undefined;
    for (const segment of parsed.segments) {
      const label = segmentLabel(segment);
      node = level.get(label);
      if (!node) {
        node = { label, grants: [], children: new Map() };
        level.set(label, node);
      }
      level = node.children;
    }
    node?.grants.push(permission);
  }
  return apps;
}
