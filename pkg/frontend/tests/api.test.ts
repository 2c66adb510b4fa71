import { describe, expect, it } from "vitest";

import { ApiError, ServiceClient, sortQueue } from "../src/api.js";
import type { QueueItem } from "../src/types.js";

function fakeFetch(routes: Record<string, { status?: number; body: unknown }>) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const route = routes[url.split("?")[0]];
    if (!route) throw new Error(`unrouted: ${url}`);
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { impl, calls };
}

describe("ServiceClient", () => {
  it("fetches and unwraps the queue", async () => {
    const items = [{ sample_id: "a", status: "pending", score: 0.5 }];
    const { impl } = fakeFetch({ "/queue": { body: { items } } });
    const client = new ServiceClient("", impl);
    expect(await client.queue()).toEqual(items);
  });

  it("posts base64 PNG labels to /labels", async () => {
    const { impl, calls } = fakeFetch({
      "/labels": { body: { id: "a", labeled: 4, pending: 1, cycle: 0 } },
    });
    const client = new ServiceClient("", impl);
    const accepted = await client.submitLabel("a", new Uint8Array([1, 2, 3]));
    expect(accepted.labeled).toBe(4);
    expect(calls[0].url).toBe("/labels");
    const payload = JSON.parse(String(calls[0].init?.body));
    expect(payload.id).toBe("a");
    expect(payload.mask_png_base64).toBe(Buffer.from([1, 2, 3]).toString("base64"));
  });

  it("surfaces machine-readable error codes", async () => {
    const { impl } = fakeFetch({
      "/labels": {
        status: 409,
        body: { detail: { code: "double_label", message: "sample 'a' is already labeled" } },
      },
    });
    const client = new ServiceClient("", impl);
    const error = await client.submitLabel("a", new Uint8Array([0])).catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.code).toBe("double_label");
  });

  it("builds payload URLs from the base url", () => {
    const client = new ServiceClient("http://svc:8000");
    expect(client.imageUrl("s1")).toBe("http://svc:8000/sample/s1/image");
    expect(client.uncertaintyUrl("s1")).toBe("http://svc:8000/sample/s1/uncertainty");
  });

  it("waitIdle polls until busy clears", async () => {
    let hits = 0;
    const impl = async (): Promise<Response> => {
      hits++;
      return new Response(JSON.stringify({ busy: hits < 3, pending: 0 }), { status: 200 });
    };
    const client = new ServiceClient("", impl);
    const status = await client.waitIdle(1);
    expect(status.busy).toBe(false);
    expect(hits).toBe(3);
  });
});

describe("sortQueue", () => {
  it("orders by score descending then id ascending", () => {
    const items: QueueItem[] = [
      { sample_id: "b", status: "pending", score: 0.2 },
      { sample_id: "a", status: "pending", score: 0.2 },
      { sample_id: "c", status: "pending", score: 0.9 },
    ];
    expect(sortQueue(items).map((i) => i.sample_id)).toEqual(["c", "a", "b"]);
  });

  it("treats missing scores as zero", () => {
    const items: QueueItem[] = [
      { sample_id: "z", status: "pending", score: null },
      { sample_id: "a", status: "pending", score: null },
      { sample_id: "m", status: "pending", score: 0.1 },
    ];
    expect(sortQueue(items).map((i) => i.sample_id)).toEqual(["m", "a", "z"]);
  });

  it("does not mutate its input", () => {
    const items: QueueItem[] = [
      { sample_id: "b", status: "pending", score: 0.1 },
      { sample_id: "a", status: "pending", score: 0.9 },
    ];
    sortQueue(items);
    expect(items[0].sample_id).toBe("b");
  });
});
