import type {
  AuditRecord,
  CreatePermissionResponse,
  GrantShortcut,
  HandlingMode,
  ModeResponse,
  PermissionRecord,
  RenderedPermission,
  TreesResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.error === "string") return body.error;
    if (typeof body?.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await parseError(response));
    }
    return (await response.json()) as T;
  }

  trees(): Promise<TreesResponse> {
    return this.request("/api/trees");
  }

  permissions(app?: string): Promise<PermissionRecord[]> {
    const query = app ? `?app=${encodeURIComponent(app)}` : "";
    return this.request(`/api/permissions${query}`);
  }

  renderedPermissions(app?: string): Promise<RenderedPermission[]> {
    const query = app ? `?app=${encodeURIComponent(app)}` : "";
    return this.request(`/api/permissions/rendered${query}`);
  }

  /**
   * Create a permission. The rvs/action strings are sent exactly as given,
   * so grant shortcuts stay byte-identical to their denial record.
   */
  createPermission(body: GrantShortcut): Promise<CreatePermissionResponse> {
    return this.request("/api/permissions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ app: body.app, rvs: body.rvs, action: body.action }),
    });
  }

  deletePermission(id: string): Promise<{ removed: PermissionRecord }> {
    return this.request(`/api/permissions/${encodeURIComponent(id)}`, {
      method: "DELETE",
    });
  }

  logs(params: { kind?: string; app?: string; after_seq?: number; limit?: number } = {}): Promise<
    AuditRecord[]
  > {
    const query = new URLSearchParams();
    if (params.kind) query.set("kind", params.kind);
    if (params.app) query.set("app", params.app);
    if (params.after_seq !== undefined) query.set("after_seq", String(params.after_seq));
    if (params.limit !== undefined) query.set("limit", String(params.limit));
    const text = query.toString();
    return this.request(`/api/logs${text ? `?${text}` : ""}`);
  }

  getMode(app: string): Promise<ModeResponse> {
    return this.request(`/api/mode?app=${encodeURIComponent(app)}`);
  }

  setMode(app: string, mode: HandlingMode): Promise<ModeResponse> {
    return this.request("/api/mode", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ app, mode }),
    });
  }
}
