// Store behavior against a mocked fetch: perspective switches stay
// read-only, mutations serialize through the queue, and state always holds
// the latest fetched snapshot.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { Store } from "../src/state.js";

interface Recorded {
  method: string;
  path: string;
}

const EMPTY_REPORT = { clean: true, violations: [], candidates: {} };
const EMPTY_MODEL = { groups: [], refGroups: [], edges: [] };
const EMPTY_SET = { perspective: "formula-groups", items: [], edges: [] };
const EMPTY_WORKBOOK = {
  workbook: { version: "1", sheets: [{ name: "S", cells: [] }] },
  values: {},
};

function makeStore(log: Recorded[],
                   gate?: { release: () => void; wait: Promise<void> }) {
  const fetchMock = vi.fn(async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.replace("http://test", "");
    log.push({ method, path });
    if (path.includes("/edits") && gate) await gate.wait;
    let body: unknown = {};
    if (path === "/sessions") body = { sessionId: "s1" };
    else if (path.includes("/workbook")) body = EMPTY_WORKBOOK;
    else if (path.includes("perspective=model")) body = EMPTY_MODEL;
    else if (path.includes("/structure")) body = EMPTY_SET;
    else if (path.includes("/violations")) body = EMPTY_REPORT;
    else if (path.includes("/edits") || path.includes("/undo")) {
      body = { changedValues: {}, report: EMPTY_REPORT };
    }
    return new Response(JSON.stringify(body), { status: 200 });
  });
  vi.stubGlobal("fetch", fetchMock);
  return new Store(new ApiClient("http://test"));
}

describe("Store", () => {
  let log: Recorded[];

  beforeEach(() => {
    log = [];
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("openSession fetches workbook, structure, model and report", async () => {
    const store = makeStore(log);
    await store.openSession("{}");
    const paths = log.map((entry) => entry.path);
    expect(paths.some((p) => p.includes("/workbook"))).toBe(true);
    expect(paths.some((p) => p.includes("/violations"))).toBe(true);
    expect(store.state.session).toBe("s1");
    expect(store.state.report?.clean).toBe(true);
  });

  it("perspective switching issues no mutation requests", async () => {
    const store = makeStore(log);
    await store.openSession("{}");
    log.length = 0;
    await store.setPerspective("graph");
    await store.setPerspective("formula-groups");
    expect(log.every((entry) => entry.method === "GET")).toBe(true);
  });

  it("mutations run strictly one at a time", async () => {
    let release!: () => void;
    const wait = new Promise<void>((resolve) => { release = resolve; });
    const store = makeStore(log, { release, wait });
    await store.openSession("{}");
    log.length = 0;

    const first = store.editCell("A1", "1");
    const second = store.editCell("A2", "2");
    await new Promise((resolve) => setTimeout(resolve, 20));
    const posts = () => log.filter((e) => e.method === "POST").length;
    expect(posts()).toBe(1);
    release();
    await Promise.all([first, second]);
    expect(posts()).toBe(2);
    const order = log.filter((e) => e.method === "POST")
      .map((e) => e.path);
    expect(order).toEqual(["/sessions/s1/edits", "/sessions/s1/edits"]);
  });

  it("a failed mutation does not block the queue", async () => {
    const store = makeStore(log);
    await store.openSession("{}");
    vi.stubGlobal("fetch", vi.fn(async (url: string, init?: RequestInit) => {
      if ((init?.method ?? "GET") === "POST") {
        return new Response(JSON.stringify(
          { error: { code: "FormulaParseError", message: "bad" } }),
          { status: 422 });
      }
      return new Response(JSON.stringify(EMPTY_WORKBOOK), { status: 200 });
    }));
    await expect(store.editCell("A1", "=)")).rejects.toMatchObject({
      error: { code: "FormulaParseError" },
    });
    // queue still accepts follow-up work
    await expect(store.enqueue(async () => 7)).resolves.toBe(7);
  });

  it("dismissViolation keeps the violation listed as dismissed", async () => {
    const store = makeStore(log);
    await store.openSession("{}");
    store.dismissViolation("v1");
    expect(store.state.dismissed).toContain("v1");
  });
});
