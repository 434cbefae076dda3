// Session view state and its URL serialization: any view is shareable by
// copying the address bar.

export interface RunParams {
  key: number;
  gamma: number;
  beta: number;
  window: number;
  startIndex: number;
  scale: number;
}

export interface SessionViewState {
  sceneId: string | null;
  algorithms: string[];
  params: RunParams;
  cursor: number;
  playing: boolean;
  overrideIndex: number | null; // null = follow the trace
  traceIds: string[];
}

export interface FieldError {
  field: string;
  message: string;
}

// Reference controller defaults.
export function defaultParams(): RunParams {
  return { key: 0.13, gamma: 0.1, beta: 14, window: 4, startIndex: 0, scale: 1 };
}

export function defaultState(): SessionViewState {
  return {
    sceneId: null,
    algorithms: ["global"],
    params: defaultParams(),
    cursor: 0,
    playing: false,
    overrideIndex: null,
    traceIds: [],
  };
}

// Client-side validation mirroring the service's 422 responses.
export function validateParams(p: RunParams): FieldError[] {
  const errors: FieldError[] = [];
  if (!(p.key > 0 && p.key < 1)) errors.push({ field: "key_raw", message: "key must be in (0,1)" });
  if (!(p.gamma >= 0 && p.gamma <= 1)) errors.push({ field: "gamma_threshold", message: "gamma must be in [0,1]" });
  if (!(p.beta >= 1)) errors.push({ field: "beta_weight", message: "beta must be >= 1" });
  if (!(Number.isInteger(p.window) && p.window >= 1))
    errors.push({ field: "smoothing_window", message: "window must be an integer >= 1" });
  if (!(Number.isInteger(p.startIndex) && p.startIndex >= 0))
    errors.push({ field: "start_index", message: "start index must be an integer >= 0" });
  if (!(Number.isInteger(p.scale) && p.scale >= 1))
    errors.push({ field: "scale", message: "scale must be an integer >= 1" });
  return errors;
}

export interface SceneBounds {
  nTimesteps: number;
  nLevels: number;
}

// Enforce the view-state invariants against the selected scene.
export function clampState(s: SessionViewState, bounds: SceneBounds): SessionViewState {
  const cursor = Math.min(Math.max(s.cursor, 0), Math.max(bounds.nTimesteps - 1, 0));
  let override = s.overrideIndex;
  if (override !== null) {
    override = Math.min(Math.max(override, 0), Math.max(bounds.nLevels - 1, 0));
  }
  return { ...s, cursor, overrideIndex: override };
}

export function encodeState(s: SessionViewState): string {
  const q = new URLSearchParams();
  if (s.sceneId) q.set("scene", s.sceneId);
  if (s.algorithms.length) q.set("algos", s.algorithms.join(","));
  q.set("key", String(s.params.key));
  q.set("gamma", String(s.params.gamma));
  q.set("beta", String(s.params.beta));
  q.set("window", String(s.params.window));
  q.set("start", String(s.params.startIndex));
  q.set("scale", String(s.params.scale));
  q.set("t", String(s.cursor));
  if (s.playing) q.set("play", "1");
  if (s.overrideIndex !== null) q.set("override", String(s.overrideIndex));
  if (s.traceIds.length) q.set("traces", s.traceIds.join(","));
  return q.toString();
}

function num(q: URLSearchParams, name: string, fallback: number): number {
  const raw = q.get(name);
  if (raw === null) return fallback;
  const v = Number(raw);
  return Number.isFinite(v) ? v : fallback;
}

export function decodeState(query: string): SessionViewState {
  const q = new URLSearchParams(query);
  const d = defaultState();
  const algos = q.get("algos");
  const override = q.get("override");
  return {
    sceneId: q.get("scene"),
    algorithms: algos ? algos.split(",").filter(Boolean) : d.algorithms,
    params: {
      key: num(q, "key", d.params.key),
      gamma: num(q, "gamma", d.params.gamma),
      beta: num(q, "beta", d.params.beta),
      window: num(q, "window", d.params.window),
      startIndex: num(q, "start", d.params.startIndex),
      scale: num(q, "scale", d.params.scale),
    },
    cursor: num(q, "t", 0),
    playing: q.get("play") === "1",
    overrideIndex: override === null ? null : Number(override),
    traceIds: (q.get("traces") ?? "").split(",").filter(Boolean),
  };
}
