/** Thin typed client for the training API; fetch is injectable for tests. */

import type {
  AgentTurn,
  ObservedVariables,
  ScenarioSummary,
  ScoreReportPayload,
  SessionState,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = JSON.stringify((await response.json()).detail);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listScenarios(): Promise<ScenarioSummary[]> {
    return this.request('GET', '/api/scenarios');
  }

  createSession(scenarioId: string): Promise<{ session_id: string }> {
    return this.request('POST', '/api/sessions', { scenario_id: scenarioId });
  }

  sendMessage(sessionId: string, text: string): Promise<AgentTurn> {
    return this.request('POST', `/api/sessions/${sessionId}/messages`, { text });
  }

  manipulate(sessionId: string, limb: string, position: string): Promise<ObservedVariables> {
    return this.request('POST', `/api/sessions/${sessionId}/manipulate`, { limb, position });
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request('GET', `/api/sessions/${sessionId}/state`);
  }

  endSession(sessionId: string): Promise<{ summary: string }> {
    return this.request('POST', `/api/sessions/${sessionId}/end`);
  }

  score(sessionId: string): Promise<ScoreReportPayload> {
    return this.request('POST', `/api/sessions/${sessionId}/score`);
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/events`;
  }
}
