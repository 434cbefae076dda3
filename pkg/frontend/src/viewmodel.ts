// Pure view models for the panels: which requests a given view state needs
// and what numbers get displayed. Every displayed value is passed through
// verbatim from a service response.
import type { HistogramQuery } from "./api.js";
import type { RunParams, SessionViewState } from "./state.js";
import type { HistogramPayload, RunRequest, Trace } from "./types.js";

export function runRequest(sceneId: string, algorithm: string, p: RunParams): RunRequest {
  return {
    scene_id: sceneId,
    algorithm,
    key_raw: p.key,
    gamma_threshold: p.gamma,
    beta_weight: p.beta,
    smoothing_window: p.window,
    start_index: p.startIndex,
    scale: p.scale,
  };
}

/** Index the viewer shows at step t: the trace's choice unless overridden. */
export function displayedIndex(state: SessionViewState, trace: Trace | null): number {
  if (state.overrideIndex !== null) return state.overrideIndex;
  if (trace && trace.steps.length > 0) {
    const t = Math.min(state.cursor, trace.steps.length - 1);
    return trace.steps[t].smoothed_index;
  }
  return state.params.startIndex;
}

export interface ComparisonRequest {
  label: string;
  query: HistogramQuery;
}

/**
 * Histogram requests for the paused comparison view: the AE algorithm's
 * chosen frame and the user-selected (slider) frame, both RAW.
 */
export function comparisonRequests(state: SessionViewState, trace: Trace): ComparisonRequest[] {
  const t = Math.min(state.cursor, trace.steps.length - 1);
  const algoIndex = trace.steps[t].smoothed_index;
  const requests: ComparisonRequest[] = [
    {
      label: "AE algorithm RAW histogram",
      query: { t, index: algoIndex, space: "raw16", algo: trace.algorithm, key: state.params.key },
    },
  ];
  if (state.overrideIndex !== null) {
    requests.push({
      label: "user selected RAW histogram",
      query: { t, index: state.overrideIndex, space: "raw16", algo: trace.algorithm, key: state.params.key },
    });
  }
  return requests;
}

/** Display model for one histogram pane; the mean is the service's, verbatim. */
export interface HistogramView {
  label: string;
  mean: number;
  key: number;
  meanText: string;
}

export function histogramView(label: string, payload: HistogramPayload): HistogramView {
  return {
    label,
    mean: payload.mean,
    key: payload.key,
    meanText: `mean ${payload.mean.toFixed(4)}`,
  };
}

export interface BannerState {
  visible: boolean;
  text: string;
}

export function serviceBanner(error: { message: string } | null): BannerState {
  if (!error) return { visible: false, text: "" };
  return { visible: true, text: `service unreachable: ${error.message}` };
}
