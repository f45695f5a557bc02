/** Typed client for the evidence-map HTTP API with stale-response guarding.
 *
 * Concurrent in-flight requests are resolved by sequence tokens: each call
 * takes a fresh token per channel and a response is delivered only if no
 * newer request on the same channel has been issued since.
 */

import {
  ApiQuery,
  DocResponse,
  MapResponse,
  SearchResponse,
  Suggestion,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class TransportError extends Error {
  constructor(message: string, public readonly retryable: boolean = true) {
    super(message);
    this.name = "TransportError";
  }
}

/** A response that arrived after a newer request was issued on its channel. */
export const STALE = Symbol("stale-response");
export type Sequenced<T> = T | typeof STALE;

class Channel {
  private issued = 0;

  next(): number {
    return ++this.issued;
  }

  isLatest(token: number): boolean {
    return token === this.issued;
  }
}

export class ApiClient {
  private channels = new Map<string, Channel>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private channel(name: string): Channel {
    let ch = this.channels.get(name);
    if (ch === undefined) {
      ch = new Channel();
      this.channels.set(name, ch);
    }
    return ch;
  }

  private async request<T>(channelName: string, url: string, init?: RequestInit): Promise<Sequenced<T>> {
    const ch = this.channel(channelName);
    const token = ch.next();
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}${url}`, init);
    } catch (err) {
      throw new TransportError(`request to ${url} failed: ${String(err)}`);
    }
    if (!ch.isLatest(token)) {
      return STALE;
    }
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const body = await resp.json();
        if (body?.error?.message) detail = `${resp.status}: ${body.error.message}`;
      } catch {
        // non-JSON error body; keep the status code
      }
      throw new TransportError(`request to ${url} failed (${detail})`, resp.status >= 500);
    }
    return (await resp.json()) as T;
  }

  autocomplete(q: string, role?: string, limit = 10): Promise<Sequenced<{ suggestions: Suggestion[] }>> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    if (role) params.set("role", role);
    return this.request("autocomplete", `/autocomplete?${params.toString()}`);
  }

  search(query: ApiQuery, page = 0, pageSize = 20): Promise<Sequenced<SearchResponse>> {
    return this.request("search", "/search", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...query, page, page_size: pageSize }),
    });
  }

  map(query: ApiQuery): Promise<Sequenced<MapResponse>> {
    return this.request("map", "/map", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(query),
    });
  }

  doc(docId: string): Promise<Sequenced<DocResponse>> {
    return this.request("doc", `/doc/${encodeURIComponent(docId)}`);
  }
}
