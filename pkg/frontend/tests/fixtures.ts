// Shared access to recorded service exchanges (fixtures/fixtures.json)
// plus a fetch double that replays them, so UI tests run against real
// server responses without a live service.

import fixturesJson from '../fixtures/fixtures.json';
import type { FetchLike } from '../src/api';

interface CurvePair {
  displacements: number[];
  forces: number[];
}

export interface Exchange {
  method: string;
  path: string;
  request: unknown;
  status: number;
  response: unknown;
}

export interface FixtureFile {
  exchanges: Exchange[];
  mesh: {
    design: Record<string, unknown>;
    z_slices: number;
    phi_samples: number;
    stl_base64: string;
  };
  parity: {
    predicted_work_j: number;
    predicted_ef_j: Record<string, number>;
    ramp: { raw: CurvePair; resampled: CurvePair; work_j: number };
    polyline: { raw: CurvePair; resampled: CurvePair; work_j: number; ef_j: Record<string, number> };
  };
}

export const FIXTURES = fixturesJson as unknown as FixtureFile;

/** Structural equality with exact number comparison (JSON-value domain). */
export function deepEqual(a: unknown, b: unknown): boolean {
  if (Object.is(a, b)) return true;
  if (typeof a !== 'object' || typeof b !== 'object' || a === null || b === null) return false;
  if (Array.isArray(a) || Array.isArray(b)) {
    if (!Array.isArray(a) || !Array.isArray(b) || a.length !== b.length) return false;
    return a.every((v, i) => deepEqual(v, b[i]));
  }
  const ka = Object.keys(a).sort();
  const kb = Object.keys(b).sort();
  if (ka.length !== kb.length || ka.some((k, i) => k !== kb[i])) return false;
  const ra = a as Record<string, unknown>;
  const rb = b as Record<string, unknown>;
  return ka.every((k) => deepEqual(ra[k], rb[k]));
}

export function b64ToArrayBuffer(b64: string): ArrayBuffer {
  const bin = atob(b64);
  const bytes = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) bytes[i] = bin.charCodeAt(i);
  return bytes.buffer;
}

export function meshBytes(): ArrayBuffer {
  return b64ToArrayBuffer(FIXTURES.mesh.stl_base64);
}

type FetchResponse = Awaited<ReturnType<FetchLike>>;

export function jsonResponse(status: number, body: unknown): FetchResponse {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
    arrayBuffer: async () => {
      throw new Error('no binary body');
    },
  };
}

export function binaryResponse(bytes: ArrayBuffer): FetchResponse {
  return {
    ok: true,
    status: 200,
    json: async () => {
      throw new Error('no JSON body');
    },
    arrayBuffer: async () => bytes,
  };
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

/**
 * Fetch double that replays recorded exchanges: a request matches when
 * method, path, and the parsed JSON body all agree. Mesh requests get
 * the recorded STL bytes regardless of design.
 */
export function fixtureFetch(): { fetchImpl: FetchLike; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const body: unknown = init.body === undefined ? null : JSON.parse(init.body);
    requests.push({ method: init.method, path, body });
    if (path === '/api/mesh') return binaryResponse(meshBytes());
    const match = FIXTURES.exchanges.find(
      (ex) => ex.method === init.method && ex.path === path && deepEqual(ex.request, body),
    );
    if (!match) throw new Error(`no recorded exchange for ${init.method} ${path} ${init.body ?? ''}`);
    return jsonResponse(match.status, match.response);
  };
  return { fetchImpl, requests };
}

export function exchange(method: string, path: string, status: number): Exchange {
  const found = FIXTURES.exchanges.find(
    (ex) => ex.method === method && ex.path === path && ex.status === status,
  );
  if (!found) throw new Error(`no fixture exchange ${method} ${path} ${status}`);
  return found;
}
