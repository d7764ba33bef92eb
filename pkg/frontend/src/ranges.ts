// Valid parameter ranges, mirrored from the service contract: sliders
// clamp at these bounds so the UI can never submit an invalid design.

import { MATERIALS } from './types';
import type { Design, Material, ScalarField } from './types';

export interface SliderSpec {
  field: ScalarField;
  label: string;
  min: number;
  max: number;
  step: number;
  unit: string;
}

export const SLIDERS: readonly SliderSpec[] = [
  { field: 'c4_base', label: 'Four-lobe (base)', min: 0, max: 1.2, step: 0.01, unit: '' },
  { field: 'c4_top', label: 'Four-lobe (top)', min: 0, max: 1.2, step: 0.01, unit: '' },
  { field: 'c8_base', label: 'Eight-lobe (base)', min: -1, max: 1, step: 0.01, unit: '' },
  { field: 'c8_top', label: 'Eight-lobe (top)', min: -1, max: 1, step: 0.01, unit: '' },
  { field: 'linear_twist', label: 'Linear twist', min: 0, max: 2 * Math.PI, step: 0.01, unit: 'rad' },
  { field: 'osc_twist_amplitude', label: 'Osc. twist amplitude', min: 0, max: Math.PI, step: 0.01, unit: 'rad' },
  { field: 'osc_twist_cycles', label: 'Osc. twist cycles', min: 0, max: 3, step: 0.01, unit: '' },
  { field: 'perimeter_ratio', label: 'Perimeter ratio', min: 1, max: 3, step: 0.01, unit: '' },
  { field: 'mass', label: 'Mass', min: 1, max: 5, step: 0.1, unit: 'g' },
  { field: 'height', label: 'Height', min: 10, max: 30, step: 0.5, unit: 'mm' },
  { field: 'thickness', label: 'Wall thickness', min: 0.4, max: 1, step: 0.01, unit: 'mm' },
];

export function sliderFor(field: ScalarField): SliderSpec {
  const spec = SLIDERS.find((s) => s.field === field);
  if (!spec) throw new Error(`no slider for field ${field}`);
  return spec;
}

export function clampField(field: ScalarField, value: number): number {
  const { min, max } = sliderFor(field);
  return Math.min(Math.max(value, min), max);
}

/** Clamp every scalar into range and coerce the material to a known one. */
export function clampDesign(design: Design): Design {
  const out = { ...design };
  for (const spec of SLIDERS) {
    out[spec.field] = clampField(spec.field, design[spec.field]);
  }
  if (!MATERIALS.includes(design.material)) out.material = 'PLA';
  return out;
}

export function defaultDesign(): Design {
  return {
    c4_base: 0,
    c4_top: 0,
    c8_base: 0,
    c8_top: 0,
    linear_twist: 0,
    osc_twist_amplitude: 0,
    osc_twist_cycles: 0,
    perimeter_ratio: 1,
    mass: 3,
    height: 20,
    thickness: 0.6,
    material: 'PLA' as Material,
  };
}
