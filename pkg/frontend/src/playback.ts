// Wall-clock-anchored playback: the cursor is derived from elapsed time, so
// a 100-frame trace at 10 FPS always spans 10 seconds regardless of timer
// jitter (late ticks skip frames instead of stretching the video).

export const DEFAULT_FPS = 10;

export function playbackDurationMs(frames: number, fps: number = DEFAULT_FPS): number {
  return (frames / fps) * 1000;
}

export class PlaybackClock {
  private epochMs: number | null = null;
  private baseCursor = 0;
  readonly fps: number;

  constructor(fps: number = DEFAULT_FPS) {
    this.fps = fps;
  }

  get running(): boolean {
    return this.epochMs !== null;
  }

  start(nowMs: number, cursor: number): void {
    this.epochMs = nowMs;
    this.baseCursor = cursor;
  }

  /** Cursor at `nowMs`, clamped to the trace end (no looping). */
  cursorAt(nowMs: number, totalFrames: number): number {
    if (this.epochMs === null) return this.baseCursor;
    const advanced = Math.floor(((nowMs - this.epochMs) * this.fps) / 1000);
    return Math.min(this.baseCursor + Math.max(advanced, 0), totalFrames - 1);
  }

  /** Freeze at the current position and return it. */
  pause(nowMs: number, totalFrames: number): number {
    const cursor = this.cursorAt(nowMs, totalFrames);
    this.epochMs = null;
    this.baseCursor = cursor;
    return cursor;
  }

  finished(nowMs: number, totalFrames: number): boolean {
    return this.running && this.cursorAt(nowMs, totalFrames) >= totalFrames - 1;
  }
}

/** Frames to prefetch ahead of the cursor for smooth playback. */
export function prefetchPlan(cursor: number, totalFrames: number, lookahead = 5): number[] {
  const plan: number[] = [];
  for (let t = cursor + 1; t <= cursor + lookahead && t < totalFrames; t++) {
    plan.push(t);
  }
  return plan;
}
