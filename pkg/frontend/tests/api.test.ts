// ApiClient behavior: request/response mapping, error surfacing, and
// the one-in-flight-per-category abort policy.

import { describe, expect, it } from 'vitest';
import { ApiClient, ApiError, isAbort } from '../src/api';
import type { FetchLike } from '../src/api';
import { defaultDesign } from '../src/ranges';
import type { ForwardResponse } from '../src/types';
import { deepEqual, exchange, fixtureFetch, jsonResponse } from './fixtures';

type FetchResponse = Awaited<ReturnType<FetchLike>>;

interface DeferredCall {
  url: string;
  init: Parameters<FetchLike>[1];
  resolve: (response: FetchResponse) => void;
}

function deferredFetch(): { fetchImpl: FetchLike; calls: DeferredCall[] } {
  const calls: DeferredCall[] = [];
  const fetchImpl: FetchLike = (url, init) =>
    new Promise((resolve, reject) => {
      init.signal?.addEventListener('abort', () => reject(new DOMException('Aborted', 'AbortError')));
      calls.push({ url, init, resolve });
    });
  return { fetchImpl, calls };
}

describe('request construction', () => {
  it('normalizes the base URL and serializes bodies', async () => {
    const { fetchImpl, calls } = deferredFetch();
    const client = new ApiClient('http://svc/', fetchImpl);
    const pending = client.inverse({ displacements: [0, 20], forces: [0, 100] }, 1);
    expect(calls).toHaveLength(1);
    const call = calls[0]!;
    expect(call.url).toBe('http://svc/api/inverse');
    expect(call.init.method).toBe('POST');
    expect(call.init.headers).toEqual({ 'content-type': 'application/json' });
    const body: unknown = JSON.parse(call.init.body!);
    expect(
      deepEqual(body, { curve: { displacements: [0, 20], forces: [0, 100] }, alpha: 1 }),
    ).toBe(true);
    call.resolve(jsonResponse(200, exchange('POST', '/api/inverse', 200).response));
    await pending;
  });

  it('sends GETs without body or content-type', async () => {
    const { fetchImpl, calls } = deferredFetch();
    const client = new ApiClient('http://svc', fetchImpl);
    const pending = client.health();
    expect(calls[0]!.init.body).toBeUndefined();
    expect(calls[0]!.init.headers).toBeUndefined();
    calls[0]!.resolve(jsonResponse(200, { status: 'ok', metadata: {} }));
    expect((await pending).status).toBe('ok');
  });
});

describe('error mapping', () => {
  it('surfaces 404 detail and the available alphas', async () => {
    const notFound = exchange('POST', '/api/inverse', 404);
    const fetchImpl: FetchLike = async () => jsonResponse(404, notFound.response);
    const client = new ApiClient('http://svc', fetchImpl);
    const err = await client
      .inverse({ displacements: [0, 20], forces: [0, 100] }, 0.5)
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(404);
    expect(apiErr.message).toBe('no inverse network loaded for alpha=0.5');
    expect(apiErr.availableAlphas).toEqual([0, 1]);
    expect(isAbort(apiErr)).toBe(false);
  });

  it('surfaces 400 validation detail without alphas', async () => {
    const bad = exchange('POST', '/api/forward', 400);
    const fetchImpl: FetchLike = async () => jsonResponse(400, bad.response);
    const client = new ApiClient('http://svc', fetchImpl);
    const err = await client
      .forward({ ...defaultDesign(), mass: 9 })
      .then(() => null)
      .catch((e: unknown) => e);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(400);
    expect(apiErr.message).toContain('mass=9.0 outside valid range');
    expect(apiErr.availableAlphas).toBeUndefined();
  });
});

describe('in-flight policy', () => {
  it('aborts a superseded request in the same category', async () => {
    const { fetchImpl, calls } = deferredFetch();
    const client = new ApiClient('http://svc', fetchImpl);
    const first = client.forward(defaultDesign());
    const second = client.forward({ ...defaultDesign(), mass: 4 });
    expect(calls).toHaveLength(2);
    expect(calls[0]!.init.signal?.aborted).toBe(true);
    expect(calls[1]!.init.signal?.aborted).toBe(false);

    const firstErr = await first.then(() => null).catch((e: unknown) => e);
    expect(isAbort(firstErr)).toBe(true);

    const body = exchange('POST', '/api/forward', 200).response as ForwardResponse;
    calls[1]!.resolve(jsonResponse(200, body));
    expect((await second).metrics.work_j).toBe(body.metrics.work_j);
  });

  it('keeps different categories independent', async () => {
    const { fetchImpl, calls } = deferredFetch();
    const client = new ApiClient('http://svc', fetchImpl);
    void client.forward(defaultDesign()).catch(() => undefined);
    void client.inverse({ displacements: [0, 1], forces: [0, 1] }, 1).catch(() => undefined);
    void client.mesh(defaultDesign()).catch(() => undefined);
    expect(calls).toHaveLength(3);
    expect(calls.every((c) => c.init.signal?.aborted === false)).toBe(true);
  });

  it('shares the meta category between health and models', async () => {
    const { fetchImpl, calls } = deferredFetch();
    const client = new ApiClient('http://svc', fetchImpl);
    const health = client.health();
    void client.models().catch(() => undefined);
    expect(calls[0]!.init.signal?.aborted).toBe(true);
    expect(isAbort(await health.then(() => null).catch((e: unknown) => e))).toBe(true);
  });
});

describe('binary responses', () => {
  it('returns mesh bytes unchanged', async () => {
    const { fetchImpl } = fixtureFetch();
    const client = new ApiClient('http://svc', fetchImpl);
    const bytes = await client.mesh(defaultDesign());
    expect(bytes.byteLength).toBe(84 + 224 * 50);
  });
});

describe('isAbort', () => {
  it('recognizes only abort-named errors', () => {
    expect(isAbort(new DOMException('Aborted', 'AbortError'))).toBe(true);
    expect(isAbort(new Error('boom'))).toBe(false);
    expect(isAbort('AbortError')).toBe(false);
  });
});
