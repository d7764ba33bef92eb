// Typed client for the inference service. Each endpoint category keeps
// at most one request in flight: starting a new one aborts its
// superseded predecessor, so rapid interactions never queue up.

import type {
  CurveArrays,
  Design,
  ErrorBody,
  ForwardResponse,
  HealthResponse,
  InverseResponse,
  ModelsResponse,
} from './types';

/** Subset of fetch the client needs; injectable for tests. */
export type FetchLike = (
  url: string,
  init: { method: string; headers?: Record<string, string>; body?: string; signal?: AbortSignal },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  arrayBuffer(): Promise<ArrayBuffer>;
}>;

export class ApiError extends Error {
  readonly status: number;
  readonly availableAlphas: number[] | undefined;

  constructor(status: number, body: ErrorBody) {
    super(body.detail || `request failed with status ${status}`);
    this.status = status;
    this.availableAlphas = body.available_alphas;
  }
}

/** Thrown (as DOMException-compatible name) when a newer request supersedes this one. */
export function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === 'AbortError';
}

type Category = 'forward' | 'inverse' | 'mesh' | 'meta';

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly inFlight = new Map<Category, AbortController>();

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  /** Abort whatever `category` currently has in flight and arm a new signal. */
  private signalFor(category: Category): AbortSignal {
    this.inFlight.get(category)?.abort();
    const controller = new AbortController();
    this.inFlight.set(category, controller);
    return controller.signal;
  }

  private async request(
    category: Category,
    method: 'GET' | 'POST',
    path: string,
    body?: unknown,
  ): Promise<{ ok: boolean; status: number; json(): Promise<unknown>; arrayBuffer(): Promise<ArrayBuffer> }> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
      signal: this.signalFor(category),
    });
    if (!response.ok) {
      const errBody = (await response.json().catch(() => ({ detail: '' }))) as ErrorBody;
      throw new ApiError(response.status, errBody);
    }
    return response;
  }

  async health(): Promise<HealthResponse> {
    const r = await this.request('meta', 'GET', '/api/health');
    return (await r.json()) as HealthResponse;
  }

  async models(): Promise<ModelsResponse> {
    const r = await this.request('meta', 'GET', '/api/models');
    return (await r.json()) as ModelsResponse;
  }

  async forward(design: Design): Promise<ForwardResponse> {
    const r = await this.request('forward', 'POST', '/api/forward', { design });
    return (await r.json()) as ForwardResponse;
  }

  async inverse(curve: CurveArrays, alpha: number): Promise<InverseResponse> {
    const r = await this.request('inverse', 'POST', '/api/inverse', { curve, alpha });
    return (await r.json()) as InverseResponse;
  }

  async mesh(design: Design): Promise<ArrayBuffer> {
    const r = await this.request('mesh', 'POST', '/api/mesh', { design });
    return await r.arrayBuffer();
  }
}
