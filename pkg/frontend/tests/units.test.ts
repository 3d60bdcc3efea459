import { describe, expect, it } from "vitest";

import { buildHierarchy } from "../src/hierarchy.js";
import { parseRvsText } from "../src/rvs.js";
import { validatePath, validateValues, buildRvsText } from "../src/validate.js";
import { denialShortcuts } from "../src/views/logs.js";
import type { AuditRecord, PermissionRecord, TreeNode } from "../src/types.js";
import { CALENDAR_TREES } from "./mock.js";

describe("rvs display parsing", () => {
  it("splits tree prefix and segments", () => {
    const parsed = parseRvsText("Calendar:Year(2026)::Month(June)");
    expect(parsed.tree).toBe("Calendar");
    expect(parsed.segments).toEqual([
      { node: "Year", value: "2026" },
      { node: "Month", value: "June" },
    ]);
  });

  it("handles unprefixed and wildcard forms", () => {
    const parsed = parseRvsText("GameId(?)");
    expect(parsed.tree).toBeNull();
    expect(parsed.segments).toEqual([{ node: "GameId", value: "?" }]);
  });
});

describe("client-side path validation", () => {
  const forest = CALENDAR_TREES.calendar;

  it("accepts complete prefixes", () => {
    expect(validatePath(forest, "Calendar", ["Year"])).toBeNull();
    expect(validatePath(forest, "Calendar", ["Year", "Month", "Day"])).toBeNull();
  });

  it("rejects skipped levels", () => {
    const problem = validatePath(forest, "Calendar", ["Year", "Day"]);
    expect(problem?.index).toBe(1);
    expect(problem?.message).toContain("not a child");
  });

  it("rejects non-root starts", () => {
    expect(validatePath(forest, "Calendar", ["Month"])?.index).toBe(0);
  });

  it("supports recursive nodes", () => {
    const files: { trees: Record<string, TreeNode>; actions: string[] } = {
      trees: {
        Files: { name: "Directory", recursive: true, children: [{ name: "File" }] },
      },
      actions: ["read"],
    };
    expect(
      validatePath(files, "Files", ["Directory", "Directory", "File"]),
    ).toBeNull();
  });

  it("requires values and forbids ')'", () => {
    expect(validateValues(["2026", "?"])).toBeNull();
    expect(validateValues([""])?.message).toContain("required");
    expect(validateValues(["a)b"])?.message).toContain("')'");
  });

  it("builds the prefixed textual form", () => {
    expect(buildRvsText("Calendar", ["Year", "Month"], ["2026", "?"])).toBe(
      "Calendar:Year(2026)::Month(?)",
    );
  });
});

describe("hierarchy grouping", () => {
  const perm = (rvs: string, action: string): PermissionRecord => ({
    id: rvs + action,
    app: "calendar",
    rvs,
    action,
    created_at: "2026-08-10T00:00:00+00:00",
    origin: "manual",
  });

  it("nests grants under their path", () => {
    const hierarchy = buildHierarchy([
      perm("Calendar:Year(2026)", "read"),
      perm("Calendar:Year(2026)::Month(June)", "read"),
      perm("Calendar:Year(2026)::Month(June)", "create"),
    ]);
    const roots = hierarchy.get("calendar")!.get("Calendar")!;
    const year = roots.get("Year(2026)")!;
    expect(year.grants.map((g) => g.action)).toEqual(["read"]);
    const june = year.children.get("Month(June)")!;
    expect(june.grants.map((g) => g.action)).toEqual(["read", "create"]);
  });
});

describe("denial shortcuts", () => {
  it("carries the verbatim remaining strings", () => {
    const record: AuditRecord = {
      seq: 9,
      timestamp: "2026-08-10T00:00:00+00:00",
      kind: "access_denied",
      subject: "calendar",
      actor: "agent",
      detail: {
        endpoint: "x",
        check: {
          decision: "denied",
          snapshot_id: 0,
          needs: [
            {
              rvs: "Calendar:Year(2026)",
              action: "read",
              satisfied: false,
              remaining: ["Calendar:Year(2026)::Month(July)"],
            },
            {
              rvs: "Calendar:Year(2025)",
              action: "write",
              satisfied: true,
              remaining: [],
            },
          ],
        },
      },
    };
    expect(denialShortcuts(record)).toEqual([
      { app: "calendar", rvs: "Calendar:Year(2026)::Month(July)", action: "read" },
    ]);
  });

  it("is empty for allowed records", () => {
    const record = {
      seq: 1,
      timestamp: "",
      kind: "access_allowed",
      subject: "calendar",
      actor: "agent",
      detail: {},
    } as AuditRecord;
    expect(denialShortcuts(record)).toEqual([]);
  });
});
