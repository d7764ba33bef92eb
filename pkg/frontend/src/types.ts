// Shared request/response shapes of the gcskit inference service.

export const MATERIALS = [
  'PETG',
  'PLA',
  'TPE_Chinchilla75A',
  'TPU_Cheetah95A',
  'TPU_NinjaFlex85A',
  'TPU_Armadillo75D',
] as const;

export type Material = (typeof MATERIALS)[number];

export interface Design {
  c4_base: number;
  c4_top: number;
  c8_base: number;
  c8_top: number;
  linear_twist: number;
  osc_twist_amplitude: number;
  osc_twist_cycles: number;
  perimeter_ratio: number;
  mass: number;
  height: number;
  thickness: number;
  material: Material;
}

export type ScalarField = Exclude<keyof Design, 'material'>;

export interface CurveArrays {
  displacements: number[];
  forces: number[];
}

export interface Metrics {
  stiffness_n_mm: number;
  work_j: number;
  max_displacement_mm: number;
}

export interface Printability {
  base_perimeter_mm: number;
  min_axis_distance_mm: number;
  passes_perimeter: boolean;
  passes_axis: boolean;
  printable: boolean;
}

export interface ForwardResponse {
  performance: number[];
  curve: CurveArrays;
  metrics: Metrics;
}

export interface InverseResponse {
  design: Design;
  predicted_curve: CurveArrays;
  printability: Printability;
  metrics_delta: Metrics;
}

export interface ModelsResponse {
  alphas: number[];
  versions: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  metadata: Record<string, unknown>;
}

/** Error body the service sends with 4xx/5xx statuses. */
export interface ErrorBody {
  detail: string;
  available_alphas?: number[];
}

export interface ControlPoint {
  /** displacement, mm */
  d: number;
  /** force, N */
  f: number;
}
