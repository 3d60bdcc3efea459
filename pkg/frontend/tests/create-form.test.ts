// Create-form behavior: structural problems stop client side before any
// request; server-side rejections render inline.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Dashboard } from "../src/app.js";
import { CALENDAR_TREES, MockService } from "./mock.js";

describe("create permission form", () => {
  let mock: MockService;
  let root: HTMLElement;
  let dashboard: Dashboard;

  beforeEach(async () => {
    document.body.innerHTML = "";
    mock = new MockService(CALENDAR_TREES);
    mock.install();
    root = document.createElement("div");
    document.body.append(root);
    dashboard = new Dashboard(root, new ApiClient(""));
    await dashboard.init();
    await dashboard.showTab("create");
  });

  function posts() {
    return mock.requests.filter((r) => r.method === "POST");
  }

  it("offers only valid children per level", () => {
    const selects = root.querySelectorAll<HTMLSelectElement>(".node-select");
    expect(selects[0].value).toBe("Year");
    const secondOptions = [...selects[1].options].map((o) => o.value);
    expect(secondOptions).toEqual(["", "Month"]); // (stop) or Month, never Day
  });

  it("blocks a path that skips a tree level before any request", async () => {
    const form = dashboard.createForm!;
    const selects = root.querySelectorAll<HTMLSelectElement>(".node-select");
    // forge an out-of-tree choice, as if the DOM were tampered with
    selects[1].append(new Option("Day", "Day"));
    selects[1].value = "Day";
    const values = root.querySelectorAll<HTMLInputElement>(".value-input");
    values[0].value = "2026";
    values[1].value = "15";

    await form.submit();

    expect(posts()).toHaveLength(0); // nothing left the browser
    expect(form.error.textContent).toContain("not a child");
  });

  it("requires a value for every segment", async () => {
    const form = dashboard.createForm!;
    const values = root.querySelectorAll<HTMLInputElement>(".value-input");
    values[0].value = "";
    await form.submit();
    expect(posts()).toHaveLength(0);
    expect(form.error.textContent).toContain("value is required");
  });

  it("renders a server validation error inline", async () => {
    const form = dashboard.createForm!;
    const values = root.querySelectorAll<HTMLInputElement>(".value-input");
    values[0].value = "2026";
    const action = root.querySelector<HTMLSelectElement>(
      'select[name="action"]',
    )!;
    action.append(new Option("execute", "execute"));
    action.value = "execute";

    await form.submit();

    expect(posts()).toHaveLength(1); // structurally fine, server rejected
    expect(form.error.textContent).toBe(
      "action 'execute' is not declared by application 'calendar'",
    );
    expect(mock.permissions).toHaveLength(0);
  });

  it("round trip: a valid submission appears in the permissions view", async () => {
    const form = dashboard.createForm!;
    const selects = root.querySelectorAll<HTMLSelectElement>(".node-select");
    selects[1].value = "Month";
    selects[1].dispatchEvent(new Event("change"));
    const values = root.querySelectorAll<HTMLInputElement>(".value-input");
    values[0].value = "2026";
    values[1].value = "June";

    await form.submit();

    expect(mock.permissions).toHaveLength(1);
    expect(mock.permissions[0].rvs).toBe("Calendar:Year(2026)::Month(June)");
    const post = posts()[0];
    expect(post.body).toBe(
      JSON.stringify({
        app: "calendar",
        rvs: "Calendar:Year(2026)::Month(June)",
        action: "read",
      }),
    );
  });

  it("shows redundancy warnings from the response", async () => {
    // the mock never warns, so drive the banner directly
    const form = dashboard.createForm!;
    form.showWarnings(["Calendar:Year(2026)"]);
    expect(form.warningBanner.textContent).toContain("Calendar:Year(2026)");
  });
});
