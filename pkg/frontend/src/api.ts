// Typed client for the ae-sim service. The UI performs no metering math:
// every displayed number originates from one of these responses.
import type {
  ApiErrorBody,
  HistogramPayload,
  RunRequest,
  RunResult,
  ScenesResponse,
  Trace,
} from "./types.js";

export class ApiError extends Error {
  readonly body: ApiErrorBody;

  constructor(body: ApiErrorBody, status: number) {
    super(`${body.code} (${status}): ${body.message}`);
    this.body = body;
  }
}

/** Monotonic sequence numbers so stale responses can be discarded. */
export class RequestSequencer {
  private counter = 0;
  private current = 0;

  begin(): number {
    this.current = ++this.counter;
    return this.current;
  }

  isCurrent(id: number): boolean {
    return id === this.current;
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "http-error", message: response.statusText };
  }
  throw new ApiError(body, response.status);
}

export interface HistogramQuery {
  t: number;
  index: number;
  space?: "raw16" | "srgb8";
  algo?: string;
  key?: number;
  gamma_threshold?: number;
  beta_weight?: number;
}

export class ApiClient {
  baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async scenes(): Promise<ScenesResponse> {
    return parseOrThrow(await fetch(`${this.baseUrl}/scenes`));
  }

  async run(request: RunRequest): Promise<RunResult> {
    return parseOrThrow(
      await fetch(`${this.baseUrl}/runs`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      }),
    );
  }

  async trace(traceId: string): Promise<Trace> {
    return parseOrThrow(await fetch(`${this.baseUrl}/runs/${traceId}`));
  }

  async histogram(sceneId: string, query: HistogramQuery): Promise<HistogramPayload> {
    const q = new URLSearchParams();
    q.set("t", String(query.t));
    q.set("index", String(query.index));
    if (query.space) q.set("space", query.space);
    if (query.algo) q.set("algo", query.algo);
    if (query.key !== undefined) q.set("key", String(query.key));
    if (query.gamma_threshold !== undefined) q.set("gamma_threshold", String(query.gamma_threshold));
    if (query.beta_weight !== undefined) q.set("beta_weight", String(query.beta_weight));
    return parseOrThrow(await fetch(`${this.baseUrl}/scenes/${sceneId}/histogram?${q}`));
  }

  frameUrl(sceneId: string, t: number, index: number, space: "raw16" | "srgb8" = "srgb8", key = 0.13): string {
    return `${this.baseUrl}/scenes/${sceneId}/frame?t=${t}&index=${index}&space=${space}&key=${key}`;
  }

  saliencyUrl(sceneId: string, t: number, index: number, binary?: number): string {
    const suffix = binary === undefined ? "" : `&binary=${binary}`;
    return `${this.baseUrl}/scenes/${sceneId}/saliency?t=${t}&index=${index}${suffix}`;
  }
}
