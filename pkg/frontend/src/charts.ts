// Canvas chart rendering split into pure layout (testable) and thin draw
// wrappers.
import type { HistogramPayload, Trace } from "./types.js";

export interface Bar {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Bar rectangles for a weighted histogram over the [0,1] value domain. */
export function histogramBars(weights: number[], width: number, height: number): Bar[] {
  const max = weights.reduce((a, b) => Math.max(a, b), 0);
  if (max <= 0) return [];
  const barWidth = width / weights.length;
  return weights.map((w, i) => {
    const h = (w / max) * height;
    return { x: i * barWidth, y: height - h, w: barWidth, h };
  });
}

/** Horizontal pixel position of the key marker in the [0,1] domain. */
export function keyMarkerX(key: number, width: number): number {
  return Math.min(Math.max(key, 0), 1) * width;
}

/** Polyline pixel points for an exposure-index-vs-time series. */
export function seriesPoints(
  indices: number[],
  nLevels: number,
  width: number,
  height: number,
): [number, number][] {
  if (indices.length === 0) return [];
  const dx = indices.length > 1 ? width / (indices.length - 1) : 0;
  const dy = nLevels > 1 ? height / (nLevels - 1) : 0;
  return indices.map((idx, t) => [t * dx, height - idx * dy]);
}

export interface LegendEntry {
  label: string;
  color: string;
  oracle: boolean;
}

export const SERIES_COLORS = ["#2d7dd2", "#d35400", "#27ae60", "#8e44ad", "#c0392b"];

/** One legend entry per trace; oracle algorithms carry a disclosure badge. */
export function legendEntries(traces: Trace[]): LegendEntry[] {
  return traces.map((trace, i) => ({
    label: trace.oracle ? `${trace.algorithm} (oracle)` : trace.algorithm,
    color: SERIES_COLORS[i % SERIES_COLORS.length],
    oracle: trace.oracle,
  }));
}

export function drawHistogram(
  ctx: CanvasRenderingContext2D,
  payload: HistogramPayload,
  color = "#4a6fa5",
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = color;
  for (const bar of histogramBars(payload.weights, width, height)) {
    ctx.fillRect(bar.x, bar.y, Math.max(bar.w, 1), bar.h);
  }
  if (payload.space === "raw16") {
    const kx = keyMarkerX(payload.key, width);
    ctx.strokeStyle = "#e74c3c";
    ctx.beginPath();
    ctx.moveTo(kx, 0);
    ctx.lineTo(kx, height);
    ctx.stroke();
  }
}

export function drawTraceChart(
  ctx: CanvasRenderingContext2D,
  traces: Trace[],
  nLevels: number,
  cursor: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  traces.forEach((trace, i) => {
    const points = seriesPoints(trace.steps.map((s) => s.smoothed_index), nLevels, width, height);
    if (!points.length) return;
    ctx.strokeStyle = SERIES_COLORS[i % SERIES_COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(points[0][0], points[0][1]);
    for (const [x, y] of points.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
  });
  const steps = traces[0]?.steps.length ?? 0;
  if (steps > 1) {
    const cx = (cursor / (steps - 1)) * width;
    ctx.strokeStyle = "#888";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(cx, 0);
    ctx.lineTo(cx, height);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
