/** Typed client for the session service; same-origin by default. */

import type {
  CandidatesDoc,
  CreateResponse,
  ErrorBody,
  PropagateResponse,
  SessionInputs,
  StateView,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body as ErrorBody);
    }
    return body as T;
  }

  createSession(inputs: SessionInputs): Promise<CreateResponse> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify(inputs),
    });
  }

  getState(id: string): Promise<StateView> {
    return this.request(`/sessions/${id}/state`);
  }

  propagate(id: string): Promise<PropagateResponse> {
    return this.request(`/sessions/${id}/propagate`, { method: "POST" });
  }

  assign(id: string, unit: string, category: string, force = false): Promise<StateView> {
    return this.request(`/sessions/${id}/assign`, {
      method: "POST",
      body: JSON.stringify({ unit, category, force }),
    });
  }

  undo(id: string): Promise<StateView> {
    return this.request(`/sessions/${id}/undo`, { method: "POST" });
  }

  candidates(id: string): Promise<CandidatesDoc> {
    return this.request(`/sessions/${id}/candidates`);
  }

  /** Full state export; the UI reads the embedded dependency graph from it. */
  exportDoc(id: string): Promise<{ graph: import("./model.js").GraphDoc }> {
    return this.request(`/sessions/${id}/export`);
  }
}
