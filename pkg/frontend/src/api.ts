/** Thin fetch client for the session service. All semantics stay server-side. */

import type { AnswerBody, QueryResponse, SessionConfig, SessionSnapshot } from "./types";

/** A non-2xx response, carrying the service's {code, message} body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asError(response: Response): Promise<ApiError> {
  let code = "error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (typeof body?.code === "string") code = body.code;
    if (typeof body?.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await asError(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  createSession(kbText: string, config: SessionConfig): Promise<SessionSnapshot> {
    return this.request("POST", "/sessions", { kbText, config });
  }

  getQuery(sessionId: string): Promise<QueryResponse> {
    return this.request("GET", `/sessions/${sessionId}/query`);
  }

  postAnswer(sessionId: string, body: AnswerBody): Promise<SessionSnapshot> {
    return this.request("POST", `/sessions/${sessionId}/answer`, body);
  }

  getState(sessionId: string): Promise<SessionSnapshot> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }
}
