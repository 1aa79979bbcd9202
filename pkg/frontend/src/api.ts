// Thin REST client. The server is the source of truth; this module only
// shapes requests and surfaces server errors with their payloads intact.

import type {
  DecisionPayload,
  Points,
  ProjectSummary,
  QueueEntry,
  SweepResult,
  VoteEcho,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly payload: Record<string, unknown>;

  constructor(status: number, payload: Record<string, unknown>) {
    const message =
      typeof payload.message === "string"
        ? payload.message
        : `request failed with status ${status}`;
    super(message);
    this.status = status;
    this.payload = payload;
  }

  get slug(): string {
    return typeof this.payload.error === "string" ? this.payload.error : "error";
  }
}

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token && token.trim() ? token.trim() : null;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const resp = await this.fetchImpl(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = {};
    try {
      payload = await resp.json();
    } catch {
      payload = {};
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, payload as Record<string, unknown>);
    }
    return payload as T;
  }

  listProjects(): Promise<{ projects: ProjectSummary[] }> {
    return this.call("GET", "/api/projects");
  }

  getProject(id: string): Promise<ProjectSummary> {
    return this.call("GET", `/api/projects/${encodeURIComponent(id)}`);
  }

  getDecision(id: string): Promise<DecisionPayload> {
    return this.call("GET", `/api/projects/${encodeURIComponent(id)}/decision`);
  }

  expertQueue(): Promise<{ entries: QueueEntry[] }> {
    return this.call("GET", "/api/expert/queue");
  }

  submitVote(id: string, points: Points, comment: string): Promise<VoteEcho> {
    const body: Record<string, unknown> = { ...points };
    if (comment.trim()) body.comment = comment.trim();
    return this.call("POST", `/api/projects/${encodeURIComponent(id)}/votes`, body);
  }

  approveProject(id: string): Promise<{ project_id: string; closes_at: string }> {
    return this.call("POST", `/api/projects/${encodeURIComponent(id)}/approve`);
  }

  runSweep(): Promise<SweepResult> {
    return this.call("POST", "/api/admin/sweep");
  }
}
