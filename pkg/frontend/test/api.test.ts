import { afterEach, describe, expect, it, vi } from "vitest";

import { createClient } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("http client", () => {
  it("fetches and decodes the target list", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, { revision: 3, targets: [{ target: "hus", total: 2, pending: 1 }] }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const body = await createClient().getTargets();
    expect(fetchMock).toHaveBeenCalledWith("/api/targets");
    expect(body.revision).toBe(3);
    expect(body.targets[0].target).toBe("hus");
  });

  it("encodes target names and paging parameters", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, { revision: 0, target: "väg", total: 0, offset: 10, rows: [] }),
    );
    vi.stubGlobal("fetch", fetchMock);
    await createClient().getCandidates("väg", 10, 50);
    expect(fetchMock).toHaveBeenCalledWith("/api/targets/v%C3%A4g/candidates?offset=10&limit=50");
  });

  it("posts decisions with the expected revision", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { revision: 5 }));
    vi.stubGlobal("fetch", fetchMock);
    const result = await createClient().postDecision("hus", "villa", "accepted", 4);
    expect(result).toEqual({ ok: true, revision: 5 });
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/targets/hus/decisions");
    expect(JSON.parse(String(init.body))).toEqual({
      candidate: "villa",
      decision: "accepted",
      expected_revision: 4,
    });
  });

  it("maps 409 to a conflict result with the current revision", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(409, { detail: "stale", revision: 9 })));
    const result = await createClient().postDecision("hus", "villa", "accepted", 2);
    expect(result).toEqual({ ok: false, conflict: true, revision: 9 });
  });

  it("throws on other error statuses", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(404, { detail: "nope" })));
    await expect(createClient().postDecision("hus", "zzz", "accepted", 0)).rejects.toThrow("404");
  });
});
