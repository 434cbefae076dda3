// DTOs mirroring the ae-sim HTTP service.

export interface SceneSummary {
  scene_id: string;
  width: number;
  height: number;
  n_timesteps: number;
  n_levels: number;
  ladder_speeds: number[];
  attributes: Record<string, boolean>;
  has_boxes: boolean;
}

export interface ScenesResponse {
  scenes: SceneSummary[];
  warnings: { scene_dir: string; code: string; message: string }[];
}

export interface TraceStep {
  t: number;
  raw_target_index: number;
  smoothed_index: number;
  shutter_seconds: number;
  histogram_mean: number | null;
  entropy: number;
  saturated_pixels: number;
  retained_pixels: number;
}

export interface Trace {
  scene_id: string;
  algorithm: string;
  scale: number;
  config: Record<string, unknown>;
  config_hash: string;
  ladder_speeds: number[];
  oracle: boolean;
  per_frame_optimal: boolean;
  steps: TraceStep[];
}

export interface RunResult {
  trace_id: string;
  trace: Trace;
}

export interface RunRequest {
  scene_id: string;
  algorithm: string;
  key_raw: number;
  gamma_threshold: number;
  beta_weight: number;
  smoothing_window: number;
  start_index: number;
  scale: number;
}

export interface HistogramPayload {
  space: string;
  algo: string;
  bins: number;
  bin_centers: number[];
  weights: number[];
  mean: number;
  key: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string | null;
}
