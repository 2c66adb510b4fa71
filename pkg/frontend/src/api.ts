/** Typed client for the annotation service. All state lives server-side;
 * the console only reads these endpoints and posts labels / advances. */

import type { AdvanceResponse, CycleRecord, LabelAccepted, Meta, QueueItem, Status } from "./types.js";
import { base64Encode } from "./png.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `${response.status}`;
      try {
        const body = await response.json();
        if (body?.detail?.code) {
          code = body.detail.code;
          message = body.detail.message ?? message;
        }
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  status(): Promise<Status> {
    return this.request<Status>("/status");
  }

  meta(): Promise<Meta> {
    return this.request<Meta>("/meta");
  }

  async queue(): Promise<QueueItem[]> {
    const body = await this.request<{ items: QueueItem[] }>("/queue");
    return body.items;
  }

  async metrics(): Promise<CycleRecord[]> {
    const body = await this.request<{ records: CycleRecord[] }>("/metrics");
    return body.records;
  }

  submitLabel(sampleId: string, png: Uint8Array): Promise<LabelAccepted> {
    return this.request<LabelAccepted>("/labels", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ id: sampleId, mask_png_base64: base64Encode(png) }),
    });
  }

  advance(): Promise<AdvanceResponse> {
    return this.request<AdvanceResponse>("/cycle/advance", { method: "POST" });
  }

  imageUrl(sampleId: string): string {
    return `${this.baseUrl}/sample/${sampleId}/image`;
  }

  predictionUrl(sampleId: string): string {
    return `${this.baseUrl}/sample/${sampleId}/prediction`;
  }

  uncertaintyUrl(sampleId: string): string {
    return `${this.baseUrl}/sample/${sampleId}/uncertainty`;
  }

  /** Poll /status until the service is no longer busy advancing a cycle. */
  async waitIdle(intervalMs = 250, timeoutMs = 120_000): Promise<Status> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.status();
      if (!status.busy) return status;
      if (Date.now() > deadline) throw new ApiError(0, "timeout", "cycle advance timed out");
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}

/** Queue ordering used by the pending list: score descending, id ascending. */
export function sortQueue(items: QueueItem[]): QueueItem[] {
  return [...items].sort((a, b) => {
    const sa = a.score ?? 0;
    const sb = b.score ?? 0;
    if (sa !== sb) return sb - sa;
    return a.sample_id < b.sample_id ? -1 : a.sample_id > b.sample_id ? 1 : 0;
  });
}
