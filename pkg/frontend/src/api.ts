/**
 * Thin client for the review API. Every audit query is a GET; the only
 * mutating calls this client can make are putConfig and enroll, and the
 * audit views never use them.
 */

import type {
  Aggregation,
  BannerState,
  DaySummary,
  FilterConfig,
  SessionDetail,
  SessionSummary,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface DayQuery {
  from?: string;
  to?: string;
  threshold?: number;
  agg?: Aggregation;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.base + path);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  getDays(query: DayQuery = {}): Promise<DaySummary[]> {
    const params = new URLSearchParams();
    if (query.from !== undefined) params.set("from", query.from);
    if (query.to !== undefined) params.set("to", query.to);
    if (query.threshold !== undefined) params.set("threshold", String(query.threshold));
    if (query.agg !== undefined) params.set("agg", query.agg);
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    return this.request<DaySummary[]>(`/api/days${suffix}`);
  }

  getSessions(date: string, threshold?: number, agg?: Aggregation): Promise<SessionSummary[]> {
    const params = new URLSearchParams();
    if (threshold !== undefined) params.set("threshold", String(threshold));
    if (agg !== undefined) params.set("agg", agg);
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    return this.request<SessionSummary[]>(`/api/days/${date}/sessions${suffix}`);
  }

  getSession(sessionId: string): Promise<SessionDetail> {
    return this.request<SessionDetail>(`/api/sessions/${sessionId}`);
  }

  captureUrl(sessionId: string, index: number): string {
    return `${this.base}/api/sessions/${sessionId}/captures/${index}`;
  }

  getConfig(): Promise<FilterConfig> {
    return this.request<FilterConfig>("/api/config");
  }

  getBanner(): Promise<BannerState> {
    return this.request<BannerState>("/api/banner");
  }

  async putConfig(patch: Partial<FilterConfig>): Promise<FilterConfig> {
    const response = await this.fetchImpl(`${this.base}/api/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(patch),
    });
    if (!response.ok) {
      const body = await response.json();
      throw new ApiError(response.status, body.code, body.message);
    }
    return (await response.json()) as FilterConfig;
  }

  async enroll(ownerId: string, portraits: number[][]): Promise<unknown> {
    const response = await this.fetchImpl(`${this.base}/api/enroll`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ owner_id: ownerId, portraits }),
    });
    if (!response.ok) {
      const body = await response.json();
      throw new ApiError(response.status, body.code, body.message);
    }
    return response.json();
  }
}
