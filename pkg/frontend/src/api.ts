// Thin typed client for the prediction service. Every in-flight request is
// cancellable; the form layer aborts a superseded query before issuing the
// next one, so stale responses never land in the UI.

import { API_SCHEMA } from "./schema.js";
import type {
  ApiError,
  HealthResponse,
  HIndexRequest,
  HIndexResponse,
  PaperRequest,
  PaperResponse,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    const payload = (await resp.json()) as T | ApiError;
    if (!resp.ok) {
      const err = (payload as ApiError).error ?? { code: "unknown", message: "request failed" };
      throw new ApiRequestError(resp.status, err.code, err.message, err.field);
    }
    return payload as T;
  }

  predictHIndex(request: HIndexRequest, signal?: AbortSignal): Promise<HIndexResponse> {
    return this.post(API_SCHEMA.endpoints.predict_hindex.path, request, signal);
  }

  predictPaper(request: PaperRequest, signal?: AbortSignal): Promise<PaperResponse> {
    return this.post(API_SCHEMA.endpoints.predict_paper.path, request, signal);
  }

  async health(signal?: AbortSignal): Promise<HealthResponse> {
    const resp = await this.fetchImpl(this.baseUrl + API_SCHEMA.endpoints.health.path, { signal });
    const payload = (await resp.json()) as HealthResponse | ApiError;
    if (!resp.ok) {
      const err = (payload as ApiError).error;
      throw new ApiRequestError(resp.status, err.code, err.message);
    }
    return payload as HealthResponse;
  }

  /**
   * The author panel draws a trajectory: one service call per horizon year,
   * in order. A shared signal cancels the whole sweep.
   */
  async hindexTrajectory(
    base: Omit<HIndexRequest, "horizon_years">,
    horizons: readonly number[],
    signal?: AbortSignal,
  ): Promise<HIndexResponse[]> {
    const out: HIndexResponse[] = [];
    for (const horizon of horizons) {
      out.push(await this.predictHIndex({ ...base, horizon_years: horizon }, signal));
    }
    return out;
  }
}

/** Re-issue guard: each call() aborts whatever was previously in flight. */
export class LatestOnly {
  private controller: AbortController | null = null;

  async call<T>(run: (signal: AbortSignal) => Promise<T>): Promise<T> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    return run(controller.signal);
  }

  cancel(): void {
    this.controller?.abort();
    this.controller = null;
  }
}
