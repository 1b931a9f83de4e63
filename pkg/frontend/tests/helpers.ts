/**
 * Test harness: an instrumented fetch that doubles as the network monitor.
 * Every request the app makes is recorded; routes serve fixture data or
 * simulate outages.
 */

import catalogFixture from "./fixtures/catalog.json";

export interface RecordedRequest {
  url: string;
  method: string;
}

type RouteHandler = () => Response | Promise<Response>;

export class FakeNetwork {
  requests: RecordedRequest[] = [];
  offlineMessage: string | null = null;
  private routes = new Map<string, RouteHandler>();

  install(): void {
    globalThis.fetch = ((input: RequestInfo | URL, init?: RequestInit) => {
      const url = typeof input === "string" ? input : input instanceof URL
        ? input.toString() : input.url;
      const method = (init?.method ?? "GET").toUpperCase();
      this.requests.push({ url, method });
      if (this.offlineMessage !== null) {
        return Promise.reject(new TypeError(this.offlineMessage));
      }
      const handler = this.routes.get(`${method} ${url.split("?")[0]}`);
      if (!handler) {
        return Promise.resolve(json(404, { error: `no route for ${method} ${url}` }));
      }
      return Promise.resolve(handler());
    }) as typeof fetch;
  }

  route(method: string, path: string, handler: RouteHandler): void {
    this.routes.set(`${method.toUpperCase()} ${path}`, handler);
  }

  serveCatalog(doc: unknown = catalogFixture): void {
    this.route("GET", "/skills", () => json(200, doc));
    for (const entry of (doc as { skills: { name: string }[] }).skills) {
      this.route("POST", `/install/${entry.name}`, () =>
        new Response(new Uint8Array([0x1f, 0x8b]), {
          status: 200,
          headers: { "Content-Type": "application/gzip" },
        }));
    }
  }

  sameOriginOnly(): boolean {
    return this.requests.every(
      (r) => r.url.startsWith("/") || r.url.startsWith(window.location.origin));
  }
}

export function json(status: number, doc: unknown): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export { catalogFixture };

export function flush(): Promise<void> {
  // Let pending promise chains settle.
  return new Promise((resolve) => setTimeout(resolve, 0));
}
