// Target-curve draft: an editable list of control points, kept sorted
// and strictly monotone in displacement so it is always a valid curve.

import type { ControlPoint, CurveArrays } from './types';

/** Minimum displacement gap enforced between neighboring points, mm. */
export const MIN_GAP_MM = 1e-3;

export interface CurveDraft {
  points: ControlPoint[];
}

export function emptyDraft(): CurveDraft {
  return { points: [] };
}

export function rampDraft(dMax: number, fMax: number): CurveDraft {
  return { points: [{ d: 0, f: 0 }, { d: dMax, f: fMax }] };
}

function clampForce(f: number): number {
  return Math.max(0, f);
}

/**
 * Insert a point, snapping its displacement into the open interval
 * between its neighbors so the draft stays strictly increasing.
 * A point landing exactly on an existing displacement replaces it.
 */
export function addPoint(draft: CurveDraft, p: ControlPoint): CurveDraft {
  const points = draft.points.slice();
  const existing = points.findIndex((q) => q.d === p.d);
  if (existing >= 0) {
    points[existing] = { d: p.d, f: clampForce(p.f) };
    return { points };
  }
  points.push({ d: Math.max(0, p.d), f: clampForce(p.f) });
  points.sort((a, b) => a.d - b.d);
  return { points };
}

/**
 * Move point `index` toward (d, f); the displacement snaps to stay at
 * least MIN_GAP_MM away from both neighbors, force clamps at zero.
 */
export function movePoint(draft: CurveDraft, index: number, d: number, f: number): CurveDraft {
  const points = draft.points.slice();
  const current = points[index];
  if (!current) return draft;
  const lo = index > 0 ? points[index - 1]!.d + MIN_GAP_MM : 0;
  const hi = index < points.length - 1 ? points[index + 1]!.d - MIN_GAP_MM : Infinity;
  points[index] = { d: Math.min(Math.max(d, lo), hi), f: clampForce(f) };
  return { points };
}

export function removePoint(draft: CurveDraft, index: number): CurveDraft {
  const points = draft.points.slice();
  points.splice(index, 1);
  return { points };
}

/** A draft can be submitted once it has two or more points. */
export function isSubmittable(draft: CurveDraft): boolean {
  return draft.points.length >= 2;
}

export function toCurveArrays(draft: CurveDraft): CurveArrays {
  return {
    displacements: draft.points.map((p) => p.d),
    forces: draft.points.map((p) => p.f),
  };
}

export function draftFromJSON(value: unknown): CurveDraft {
  if (typeof value !== 'object' || value === null || !Array.isArray((value as CurveDraft).points)) {
    throw new Error('draft: expected {points: [...]}');
  }
  let draft = emptyDraft();
  for (const p of (value as CurveDraft).points) {
    if (typeof p?.d !== 'number' || typeof p?.f !== 'number' || !isFinite(p.d) || !isFinite(p.f)) {
      throw new Error('draft: points must have finite numeric d and f');
    }
    draft = addPoint(draft, p);
  }
  return draft;
}
