/** Thin typed client for the annotation service's HTTP JSON API. */

import type {
  AgreementReport,
  Progress,
  RatingSubmission,
  TaskView,
} from './types.js';

/** Non-2xx response from the service. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
  }
}

/** Transport failure: the request never got an HTTP response. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`network failure: ${String(cause)}`);
    this.name = 'NetworkError';
  }
}

export type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (cause) {
      throw new NetworkError(cause);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  /** Next unrated task for this rater, or null when everything is rated. */
  async fetchNextTask(raterId: string): Promise<TaskView | null> {
    try {
      const response = await this.request(
        `/api/tasks/next?rater=${encodeURIComponent(raterId)}`,
      );
      return (await response.json()) as TaskView;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) return null;
      throw error;
    }
  }

  async submitRating(rating: RatingSubmission): Promise<void> {
    await this.request('/api/ratings', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(rating),
    });
  }

  async fetchProgress(raterId: string): Promise<Progress> {
    const response = await this.request(
      `/api/progress?rater=${encodeURIComponent(raterId)}`,
    );
    return (await response.json()) as Progress;
  }

  async fetchAgreement(): Promise<AgreementReport> {
    const response = await this.request('/api/agreement');
    return (await response.json()) as AgreementReport;
  }

  /** Raw annotation JSONL, one record per line. */
  async fetchExport(): Promise<string> {
    const response = await this.request('/api/export');
    return response.text();
  }
}
