// Shapes of the service's JSON responses. The dashboard never computes a
// permission decision itself; everything displayed comes from these.

export interface TreeNode {
  name: string;
  recursive?: boolean;
  kind?: "enum" | "interval";
  children?: TreeNode[];
}

export interface Forest {
  trees: Record<string, TreeNode>;
  actions: string[];
}

export type TreesResponse = Record<string, Forest>;

export interface PermissionRecord {
  id: string;
  app: string;
  rvs: string;
  action: string;
  created_at: string;
  origin: string;
}

export interface CreatePermissionResponse {
  id: string;
  permission: PermissionRecord;
  warnings: PermissionRecord[];
}

export interface RenderedPermission {
  id: string;
  app: string;
  text: string;
}

export interface NeedOutcome {
  rvs: string;
  action: string;
  satisfied: boolean;
  remaining: string[];
  diagnostic?: string;
}

export interface CheckResultJson {
  decision: "granted" | "denied";
  snapshot_id: number;
  needs: NeedOutcome[];
  diagnostic?: string;
}

export interface AccessDetail {
  endpoint?: string;
  args?: Record<string, unknown>;
  check?: CheckResultJson;
  failed?: boolean;
  mode?: string;
  [key: string]: unknown;
}

export interface AuditRecord {
  seq: number;
  timestamp: string;
  kind:
    | "perm_created"
    | "perm_removed"
    | "access_allowed"
    | "access_denied"
    | "mode_changed"
    | "perm_auto_deployed";
  subject: string;
  detail: AccessDetail;
  actor: "user" | "system" | "agent";
}

export type HandlingMode = "ask" | "skip" | "infer" | "yolo";

export interface ModeResponse {
  app: string;
  mode: HandlingMode;
}

/** One grantable (rvs, action) pair, carried verbatim from a denial record. */
export interface GrantShortcut {
  app: string;
  rvs: string;
  action: string;
}

export interface PendingSuggestion {
  seq: number;
  app: string;
  endpoint: string;
  pairs: GrantShortcut[];
}
