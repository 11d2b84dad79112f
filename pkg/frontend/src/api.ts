/** Thin typed client over the service HTTP API.
 *
 * Every number the UI shows comes from these responses; the client never
 * post-processes values, it only parses JSON.
 */

import type {
  FeatureCollection,
  GridResponse,
  HealthResponse,
  NetworkResponse,
  RouteRequestBody,
  RouteResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`request failed with status ${status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail: unknown = null;
      try {
        detail = await resp.json();
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return resp;
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.request("/api/health");
    return resp.json();
  }

  async postRoute(body: RouteRequestBody): Promise<RouteResponse> {
    const resp = await this.request("/api/route", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return resp.json();
  }

  /** The server-side .txt export, returned byte for byte. */
  async exportRouteTxt(body: RouteRequestBody): Promise<string> {
    const resp = await this.request("/api/route/export", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return resp.text();
  }

  async fetchRisk(transform: "raw" | "boxcox"): Promise<GridResponse> {
    const resp = await this.request(`/api/risk?transform=${transform}`);
    return resp.json();
  }

  async fetchContours(levels: number[], transform: "raw" | "boxcox"): Promise<FeatureCollection> {
    const resp = await this.request(`/api/contours?levels=${levels.join(",")}&transform=${transform}`);
    return resp.json();
  }

  async fetchNetwork(): Promise<NetworkResponse> {
    const resp = await this.request("/api/network");
    return resp.json();
  }
}
