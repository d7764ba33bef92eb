// Client-side curve metrics, kept formula-for-formula identical to the
// server so readouts can be cross-checked against its responses.

const NMM_TO_J = 1e-3;

/** Canonical resampling grid size shared with the service. */
export const GRID_POINTS = 100;

function checkLengths(displacements: readonly number[], forces: readonly number[]) {
  if (displacements.length !== forces.length || displacements.length < 2) {
    throw new Error('curve needs equal-length displacement/force arrays (>= 2 points)');
  }
}

/** Trapezoidal area under the curve, N·mm converted to J. */
export function workJ(displacements: readonly number[], forces: readonly number[]): number {
  checkLengths(displacements, forces);
  let area = 0;
  for (let i = 1; i < displacements.length; i++) {
    area += 0.5 * (forces[i]! + forces[i - 1]!) * (displacements[i]! - displacements[i - 1]!);
  }
  return area * NMM_TO_J;
}

export function peakForceN(forces: readonly number[]): number {
  let peak = -Infinity;
  for (const f of forces) peak = Math.max(peak, f);
  return peak;
}

/**
 * Work (J) accumulated before the force first strictly exceeds the
 * threshold; the crossing point is linearly interpolated within its
 * segment, and a never-exceeded threshold yields the full work.
 */
export function energyBeforeThresholdJ(
  displacements: readonly number[],
  forces: readonly number[],
  fThreshold: number,
): number {
  checkLengths(displacements, forces);
  if (!(fThreshold > 0)) throw new Error('fThreshold must be positive');
  let j = -1;
  for (let i = 0; i < forces.length; i++) {
    if (forces[i]! > fThreshold) {
      j = i;
      break;
    }
  }
  if (j === -1) return workJ(displacements, forces);
  if (j === 0) return 0;
  let area = 0;
  for (let i = 1; i < j; i++) {
    area += 0.5 * (forces[i]! + forces[i - 1]!) * (displacements[i]! - displacements[i - 1]!);
  }
  const f0 = forces[j - 1]!;
  const f1 = forces[j]!;
  const dCross =
    displacements[j - 1]! +
    ((fThreshold - f0) / (f1 - f0)) * (displacements[j]! - displacements[j - 1]!);
  area += 0.5 * (f0 + fThreshold) * (dCross - displacements[j - 1]!);
  return area * NMM_TO_J;
}

/** |a − b| relative to max(|a|, |b|), 0 when both are 0. */
export function relativeError(a: number, b: number): number {
  const scale = Math.max(Math.abs(a), Math.abs(b));
  if (scale === 0) return 0;
  return Math.abs(a - b) / scale;
}

/**
 * Linear interpolation onto the canonical 100-point grid, matching the
 * server's resampling: endpoint forces are held outside the sampled
 * range, except that a curve starting after zero displacement is
 * linearly extrapolated back to zero and clamped at >= 0.
 */
export function resampleToGrid(
  displacements: readonly number[],
  forces: readonly number[],
): { displacements: number[]; forces: number[] } {
  checkLengths(displacements, forces);
  const dMax = displacements[displacements.length - 1]!;
  const step = dMax / (GRID_POINTS - 1);
  const grid = Array.from({ length: GRID_POINTS }, (_, i) => i * step);
  grid[GRID_POINTS - 1] = dMax;

  const out = grid.map((x) => {
    if (x <= displacements[0]!) return forces[0]!;
    if (x >= dMax) return forces[forces.length - 1]!;
    let j = 0;
    while (displacements[j + 1]! < x) j++;
    const slope = (forces[j + 1]! - forces[j]!) / (displacements[j + 1]! - displacements[j]!);
    return forces[j]! + slope * (x - displacements[j]!);
  });

  const d0 = displacements[0]!;
  if (d0 > 0) {
    const slope = (forces[1]! - forces[0]!) / (displacements[1]! - displacements[0]!);
    for (let i = 0; i < GRID_POINTS; i++) {
      if (grid[i]! < d0) out[i] = Math.max(forces[0]! + slope * (grid[i]! - d0), 0);
    }
  }
  return { displacements: grid, forces: out };
}
