import { describe, expect, it } from "vitest";

import { PlaybackClock, playbackDurationMs, prefetchPlan } from "./playback.js";

describe("playback clock", () => {
  it("plays 100 frames at 10 FPS in 10 seconds", () => {
    expect(playbackDurationMs(100, 10)).toBe(10_000);
    const clock = new PlaybackClock(10);
    clock.start(0, 0);
    // last frame is reached at 9.9 s and holds through 10 s
    expect(clock.cursorAt(9_899, 100)).toBe(98);
    expect(clock.cursorAt(9_900, 100)).toBe(99);
    expect(clock.cursorAt(10_000, 100)).toBe(99);
    expect(clock.finished(9_900, 100)).toBe(true);
    expect(clock.finished(9_899, 100)).toBe(false);
  });

  it("advances exactly one frame per 100 ms with no drift", () => {
    const clock = new PlaybackClock(10);
    clock.start(500, 0);
    for (let k = 0; k < 100; k++) {
      expect(clock.cursorAt(500 + k * 100, 100)).toBe(k);
      expect(clock.cursorAt(500 + k * 100 + 99.9, 100)).toBe(k);
    }
  });

  it("skips frames after a late tick instead of stretching playback", () => {
    const clock = new PlaybackClock(10);
    clock.start(0, 0);
    expect(clock.cursorAt(1_000, 100)).toBe(10); // 1 s late: straight to frame 10
  });

  it("pause freezes the cursor and resume continues from it", () => {
    const clock = new PlaybackClock(10);
    clock.start(0, 20);
    const frozen = clock.pause(400, 100);
    expect(frozen).toBe(24);
    expect(clock.running).toBe(false);
    expect(clock.cursorAt(9_999, 100)).toBe(24); // frozen while paused
    clock.start(1_000, frozen);
    expect(clock.cursorAt(1_100, 100)).toBe(25);
  });
});

describe("prefetch plan", () => {
  it("covers the next five frames along the trace", () => {
    expect(prefetchPlan(10, 100)).toEqual([11, 12, 13, 14, 15]);
  });

  it("truncates at the end of the trace", () => {
    expect(prefetchPlan(97, 100)).toEqual([98, 99]);
    expect(prefetchPlan(99, 100)).toEqual([]);
  });
});
