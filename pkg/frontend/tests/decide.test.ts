import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, describe, expect, it, vi } from "vitest";

import type { DecideResponse, SliceResponse } from "../src/api.js";
import { Channel, postDecide } from "../src/api.js";
import { targetFromSliceVertex } from "../src/charts.js";

const here = dirname(fileURLToPath(import.meta.url));

function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "..", "fixtures", name), "utf-8")) as T;
}

const decideFixture = loadFixture<DecideResponse>("decide_table.json");

afterEach(() => {
  vi.unstubAllGlobals();
});

function okResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

describe("decide round trip", () => {
  it("returns the planted input on the deterministic fixture", async () => {
    const fetchMock = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe("/decide");
      const body = JSON.parse(String(init?.body));
      expect(body.target).toEqual([2.0, 1.0, 1.2]);
      return okResponse(decideFixture);
    });
    vi.stubGlobal("fetch", fetchMock);
    const decision = await postDecide("", [2.0, 1.0, 1.2]);
    expect(decision.input_id).toBe("x2");
    expect(decision.loss).toBeCloseTo(0, 12);
    expect(fetchMock).toHaveBeenCalledTimes(1);
  });

  it("maps the same clicked vertex to the same target twice", () => {
    const slice = loadFixture<SliceResponse>("slice_sphere.json");
    const first = targetFromSliceVertex(slice, 42, 3);
    const second = targetFromSliceVertex(slice, 42, 3);
    expect(first).toEqual(second);
  });

  it("surfaces validation errors from the server", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        new Response(JSON.stringify({ detail: "target must strongly dominate the reference vector" }), {
          status: 400,
        }),
      ),
    );
    await expect(postDecide("", [-1, -1, -1])).rejects.toThrow(/strongly dominate/);
  });
});

describe("latest-wins channel", () => {
  it("aborts the in-flight request when a new one starts", async () => {
    const seen: Array<AbortSignal | undefined> = [];
    const gate: Array<() => void> = [];
    vi.stubGlobal(
      "fetch",
      vi.fn((url: RequestInfo | URL, init?: RequestInit) => {
        seen.push(init?.signal ?? undefined);
        return new Promise<Response>((resolve, reject) => {
          const signal = init?.signal;
          const finish = () => resolve(okResponse({ ok: String(url) }));
          gate.push(finish);
          signal?.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
        });
      }),
    );
    const channel = new Channel("");
    const first = channel.get<{ ok: string }>("/slice?i=0&j=1");
    const second = channel.get<{ ok: string }>("/slice?i=0&j=2");
    expect(seen[0]?.aborted).toBe(true);
    gate[1]();
    await expect(first).rejects.toThrow(/abort/i);
    await expect(second).resolves.toEqual({ ok: "/slice?i=0&j=2" });
  });
});
