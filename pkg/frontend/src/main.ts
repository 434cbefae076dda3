// DOM wiring for the explorer: configuration panel, 10 FPS viewer with pause
// and exposure-stack slider, histogram/trace panels. All state changes flow
// through one render() pass and are mirrored into the URL.
import { ApiClient, ApiError, RequestSequencer } from "./api.js";
import { drawHistogram, drawTraceChart, legendEntries } from "./charts.js";
import { DEFAULT_FPS, PlaybackClock, prefetchPlan } from "./playback.js";
import {
  clampState,
  decodeState,
  defaultState,
  encodeState,
  SessionViewState,
  validateParams,
} from "./state.js";
import type { SceneSummary, Trace } from "./types.js";
import {
  comparisonRequests,
  displayedIndex,
  histogramView,
  runRequest,
  serviceBanner,
} from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const api = new ApiClient(
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8000",
);

let state: SessionViewState = { ...defaultState(), ...decodeState(location.search.slice(1)) };
let scenes: SceneSummary[] = [];
let traces: Map<string, Trace> = new Map(); // trace id -> trace, insertion = run order
const clock = new PlaybackClock(DEFAULT_FPS);
const histogramSeq = new RequestSequencer();
const prefetched = new Set<string>();
let runInFlight = false;

function currentScene(): SceneSummary | null {
  return scenes.find((s) => s.scene_id === state.sceneId) ?? null;
}

function primaryTrace(): Trace | null {
  const first = traces.values().next();
  return first.done ? null : first.value;
}

function syncUrl(): void {
  const query = encodeState(state);
  const service = new URLSearchParams(location.search).get("service");
  const suffix = service ? `&service=${encodeURIComponent(service)}` : "";
  history.replaceState(null, "", `?${query}${suffix}`);
}

function setBanner(error: { message: string } | null): void {
  const banner = serviceBanner(error);
  const el = $("banner");
  el.style.display = banner.visible ? "block" : "none";
  el.textContent = banner.text;
}

async function refreshScenes(): Promise<void> {
  try {
    const body = await api.scenes();
    scenes = body.scenes;
    setBanner(null);
    const select = $("scene") as unknown as HTMLSelectElement;
    select.innerHTML = "";
    for (const scene of scenes) {
      const opt = document.createElement("option");
      opt.value = scene.scene_id;
      opt.textContent = `${scene.scene_id} (${scene.n_timesteps} steps, ${scene.n_levels} levels)`;
      select.appendChild(opt);
    }
    if (!currentScene() && scenes.length) state.sceneId = scenes[0].scene_id;
    if (state.sceneId) select.value = state.sceneId;
  } catch (err) {
    setBanner(err as Error);
  }
}

function readParamsForm(): void {
  state.params = {
    key: Number(($("key") as HTMLInputElement).value),
    gamma: Number(($("gamma") as HTMLInputElement).value),
    beta: Number(($("beta") as HTMLInputElement).value),
    window: Number(($("window") as HTMLInputElement).value),
    startIndex: Number(($("start") as HTMLInputElement).value),
    scale: Number(($("scale") as HTMLInputElement).value),
  };
}

function writeParamsForm(): void {
  ($("key") as HTMLInputElement).value = String(state.params.key);
  ($("gamma") as HTMLInputElement).value = String(state.params.gamma);
  ($("beta") as HTMLInputElement).value = String(state.params.beta);
  ($("window") as HTMLInputElement).value = String(state.params.window);
  ($("start") as HTMLInputElement).value = String(state.params.startIndex);
  ($("scale") as HTMLInputElement).value = String(state.params.scale);
}

async function runSelected(): Promise<void> {
  if (runInFlight || !state.sceneId) return;
  readParamsForm();
  const errors = validateParams(state.params);
  $("form-errors").textContent = errors.map((e) => `${e.field}: ${e.message}`).join("; ");
  if (errors.length) return;
  const algorithms = Array.from(
    document.querySelectorAll<HTMLInputElement>("input[name=algo]:checked"),
  ).map((el) => el.value);
  if (!algorithms.length) return;
  runInFlight = true;
  ($("run") as HTMLButtonElement).disabled = true;
  traces = new Map();
  state.traceIds = [];
  try {
    for (const algorithm of algorithms) {
      const result = await api.run(runRequest(state.sceneId, algorithm, state.params));
      traces.set(result.trace_id, result.trace);
      state.traceIds.push(result.trace_id);
    }
    state.cursor = 0;
    state.overrideIndex = null;
    startPlayback();
    setBanner(null);
  } catch (err) {
    if (err instanceof ApiError) {
      $("form-errors").textContent = `${err.body.field ?? ""} ${err.body.message}`.trim();
      if (err.body.code === "unknown-scene") await refreshScenes(); // dataset swapped under us
    } else {
      setBanner(err as Error);
    }
  } finally {
    runInFlight = false;
    ($("run") as HTMLButtonElement).disabled = false;
  }
}

function startPlayback(): void {
  state.playing = true;
  clock.start(performance.now(), state.cursor);
  requestAnimationFrame(tick);
  render();
}

function pausePlayback(): void {
  if (!state.playing) return;
  state.cursor = clock.pause(performance.now(), totalFrames());
  state.playing = false;
  render();
}

function totalFrames(): number {
  return primaryTrace()?.steps.length ?? currentScene()?.n_timesteps ?? 1;
}

function tick(): void {
  if (!state.playing) return;
  const now = performance.now();
  const cursor = clock.cursorAt(now, totalFrames());
  if (cursor !== state.cursor) {
    state.cursor = cursor;
    render();
  }
  if (clock.finished(now, totalFrames())) {
    pausePlayback();
    return;
  }
  requestAnimationFrame(tick);
}

function prefetchFrames(trace: Trace): void {
  for (const t of prefetchPlan(state.cursor, trace.steps.length)) {
    const url = api.frameUrl(trace.scene_id, t, trace.steps[t].smoothed_index, "srgb8", state.params.key);
    if (!prefetched.has(url)) {
      prefetched.add(url);
      new Image().src = url;
    }
  }
}

function renderFrame(): void {
  const scene = currentScene();
  if (!scene) return;
  const trace = primaryTrace();
  const index = displayedIndex(state, trace);
  const img = $("frame") as HTMLImageElement;
  const url = api.frameUrl(scene.scene_id, state.cursor, index, "srgb8", state.params.key);
  if (img.src !== url) {
    img.src = url;
    img.onerror = () => {
      img.alt = "frame unavailable - retrying";
      setTimeout(() => {
        img.src = `${url}&retry=${Date.now()}`;
      }, 500);
    };
  }
  $("frame-caption").textContent =
    `t=${state.cursor}  index=${index}` + (state.overrideIndex !== null ? " (user override)" : "");
  const overlay = $("saliency-overlay") as HTMLImageElement;
  if (($("overlay-toggle") as HTMLInputElement).checked) {
    overlay.style.display = "block";
    overlay.src = api.saliencyUrl(scene.scene_id, state.cursor, index, state.params.gamma);
  } else {
    overlay.style.display = "none";
  }
  if (trace) prefetchFrames(trace);
}

async function renderHistograms(): Promise<void> {
  const scene = currentScene();
  const trace = primaryTrace();
  if (!scene || !trace) return;
  const seq = histogramSeq.begin();
  const requests = comparisonRequests(state, trace);
  try {
    const payloads = await Promise.all(requests.map((r) => api.histogram(scene.scene_id, r.query)));
    if (!histogramSeq.isCurrent(seq)) return; // stale response: a newer view exists
    const panes = [$("hist-algo"), $("hist-user")];
    const canvases = [$("hist-algo-canvas"), $("hist-user-canvas")];
    panes[1].style.display = payloads.length > 1 ? "block" : "none";
    payloads.forEach((payload, i) => {
      const view = histogramView(requests[i].label, payload);
      $(`${i === 0 ? "hist-algo" : "hist-user"}-label`).textContent = `${view.label} - ${view.meanText}`;
      drawHistogram((canvases[i] as HTMLCanvasElement).getContext("2d")!, payload);
    });
    const index = displayedIndex(state, trace);
    const srgb = await api.histogram(scene.scene_id, {
      t: state.cursor, index, space: "srgb8", algo: "global", key: state.params.key,
    });
    if (!histogramSeq.isCurrent(seq)) return;
    drawHistogram(($("hist-srgb") as HTMLCanvasElement).getContext("2d")!, srgb, "#6a7f4a");
    setBanner(null);
  } catch (err) {
    setBanner(err as Error);
  }
}

function renderTraceChart(): void {
  const scene = currentScene();
  const list = Array.from(traces.values());
  if (!scene || !list.length) return;
  drawTraceChart(
    ($("trace-chart") as HTMLCanvasElement).getContext("2d")!,
    list, scene.n_levels, state.cursor,
  );
  const legend = $("legend");
  legend.innerHTML = "";
  for (const entry of legendEntries(list)) {
    const span = document.createElement("span");
    span.textContent = entry.label;
    span.style.color = entry.color;
    span.className = entry.oracle ? "legend oracle" : "legend";
    legend.appendChild(span);
  }
}

function render(): void {
  const scene = currentScene();
  if (scene) {
    state = clampState(state, { nTimesteps: scene.n_timesteps, nLevels: scene.n_levels });
    const tSlider = $("t-slider") as HTMLInputElement;
    tSlider.max = String(scene.n_timesteps - 1);
    tSlider.value = String(state.cursor);
    const eSlider = $("e-slider") as HTMLInputElement;
    eSlider.max = String(scene.n_levels - 1);
    eSlider.value = String(state.overrideIndex ?? displayedIndex(state, primaryTrace()));
    eSlider.disabled = state.playing;
  }
  $("play").textContent = state.playing ? "pause" : "play";
  renderFrame();
  renderTraceChart();
  void renderHistograms();
  syncUrl();
}

function wire(): void {
  ($("scene") as HTMLSelectElement).addEventListener("change", (e) => {
    state.sceneId = (e.target as HTMLSelectElement).value;
    traces = new Map();
    state.traceIds = [];
    state.cursor = 0;
    state.overrideIndex = null;
    render();
  });
  $("run").addEventListener("click", () => void runSelected());
  $("play").addEventListener("click", () => {
    if (state.playing) {
      pausePlayback();
    } else {
      startPlayback();
    }
  });
  ($("t-slider") as HTMLInputElement).addEventListener("input", (e) => {
    pausePlayback();
    state.cursor = Number((e.target as HTMLInputElement).value);
    render();
  });
  ($("e-slider") as HTMLInputElement).addEventListener("input", (e) => {
    if (state.playing) return;
    state.overrideIndex = Number((e.target as HTMLInputElement).value);
    render();
  });
  $("follow").addEventListener("click", () => {
    state.overrideIndex = null;
    render();
  });
  $("overlay-toggle").addEventListener("change", () => render());
}

async function bootstrap(): Promise<void> {
  writeParamsForm();
  wire();
  await refreshScenes();
  render();
}

void bootstrap();
