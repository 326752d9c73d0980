// Orchestration: wires uploads, steering interactions, and export to
// the rendering service. Renders are debounced, at most one request is
// in flight, and responses that a newer interaction has superseded are
// discarded by sequence number — the preview only ever moves forward.

import { ApiError, RenderService } from "./api.js";
import { debounce, Debounced, RenderSequencer } from "./debounce.js";
import { LcmRaster } from "./raster.js";
import {
  canExport,
  canPaint,
  clampAlpha,
  initialState,
  Mode,
  UiState,
} from "./state.js";

export interface ControllerOptions {
  client: RenderService;
  /** Turn preview bytes into a displayable URL (object URL in the browser). */
  makeUrl?: (bytes: Uint8Array) => string;
  releaseUrl?: (url: string) => void;
  onChange?: (state: UiState) => void;
  debounceMs?: number;
}

type RenderParams =
  | { kind: "alpha"; alpha: number }
  | { kind: "lcm" };

export interface ExportedArtifacts {
  drawing: Uint8Array;
  /** Present when the current preview came from a painted control matrix. */
  lcm?: Uint8Array;
}

export class UiController {
  readonly state: UiState = initialState();

  private readonly client: RenderService;
  private readonly makeUrl: (bytes: Uint8Array) => string;
  private readonly releaseUrl: (url: string) => void;
  private readonly onChange: (state: UiState) => void;
  private readonly schedule: Debounced<[]>;
  private readonly sequencer = new RenderSequencer();

  private plan?: { params: RenderParams; id: number };
  private lastParams?: RenderParams;
  private flying = false;

  constructor(options: ControllerOptions) {
    this.client = options.client;
    this.makeUrl = options.makeUrl ?? (() => "");
    this.releaseUrl = options.releaseUrl ?? (() => {});
    this.onChange = options.onChange ?? (() => {});
    this.schedule = debounce(() => void this.pump(), options.debounceMs ?? 150);
  }

  private notify(): void {
    this.onChange(this.state);
  }

  /** Upload a new source image; any previous session state is discarded. */
  async uploadFlow(png: Uint8Array): Promise<void> {
    const s = this.state;
    try {
      const uploaded = await this.client.uploadImage(png);
      this.schedule.cancel();
      this.plan = undefined;
      this.lastParams = undefined;
      this.sequencer.begin(); // orphan any response still in flight
      if (s.preview) this.releaseUrl(s.preview.url);
      if (s.sourceUrl) this.releaseUrl(s.sourceUrl);
      s.imageId = uploaded.imageId;
      s.imageWidth = uploaded.width;
      s.imageHeight = uploaded.height;
      s.lcmCanvas = new LcmRaster(uploaded.width, uploaded.height, s.globalAlpha);
      s.preview = undefined;
      s.etfUrl = this.client.etfUrl(uploaded.imageId);
      s.sourceUrl = this.client.imageUrl(uploaded.imageId);
      s.lastError = undefined;
      s.inFlight = false;
    } catch (err) {
      // keep the previous session intact; surface the failure
      s.lastError = describe(err);
    }
    this.notify();
  }

  setMode(mode: Mode): void {
    if (mode === "paint" && !canPaint(this.state)) {
      this.state.lastError = "upload an image before painting";
      this.notify();
      return;
    }
    this.state.mode = mode;
    this.notify();
  }

  setBrush(radius: number, value: number): void {
    this.state.brush = { radius, value: clampAlpha(value) };
    this.notify();
  }

  /** Global-control slider movement. */
  slider(alpha: number): void {
    const s = this.state;
    s.globalAlpha = clampAlpha(alpha);
    this.notify();
    if (s.imageId === undefined || s.mode !== "global") return;
    this.requestRender({ kind: "alpha", alpha: s.globalAlpha });
  }

  /** One brush stamp in canvas pixel coordinates. */
  brushStroke(cx: number, cy: number): void {
    const s = this.state;
    if (s.mode !== "paint" || !canPaint(s)) return;
    s.lcmCanvas!.stamp(cx, cy, s.brush.radius, s.brush.value);
    this.notify();
    this.requestRender({ kind: "lcm" });
  }

  /** Re-issue the last failed or superseded render immediately. */
  retry(): void {
    if (!this.lastParams) return;
    this.requestRender(this.lastParams);
    this.schedule.flush();
  }

  exportArtifacts(): ExportedArtifacts {
    const s = this.state;
    if (!canExport(s)) {
      throw new Error("nothing rendered yet");
    }
    return { drawing: s.preview!.bytes, lcm: s.preview!.lcmPng };
  }

  /** Resolves once no render is scheduled or in flight (test hook). */
  async settled(): Promise<void> {
    while (this.flying || this.plan) {
      await new Promise((resolve) => setTimeout(resolve, 5));
    }
  }

  private requestRender(params: RenderParams): void {
    this.lastParams = params;
    this.plan = { params, id: this.sequencer.begin() };
    this.schedule();
  }

  private async pump(): Promise<void> {
    if (this.flying || !this.plan) return;
    const { params, id } = this.plan;
    this.plan = undefined;
    this.flying = true;
    const s = this.state;
    s.inFlight = true;
    s.lastError = undefined;
    this.notify();
    try {
      const imageId = s.imageId;
      if (imageId === undefined) throw new Error("no image uploaded");
      let bytes: Uint8Array;
      let lcmPng: Uint8Array | undefined;
      if (params.kind === "alpha") {
        bytes = await this.client.render({ imageId, alpha: params.alpha });
      } else {
        lcmPng = await s.lcmCanvas!.toPng();
        const lcmId = await this.client.uploadLcm(imageId, lcmPng);
        bytes = await this.client.render({ imageId, lcmId });
      }
      if (this.sequencer.shouldApply(id)) {
        this.sequencer.markApplied(id);
        if (s.preview) this.releaseUrl(s.preview.url);
        s.preview = { bytes, url: this.makeUrl(bytes), lcmPng };
      }
    } catch (err) {
      // previous preview is retained; retry() re-issues the last params
      s.lastError = describe(err);
    } finally {
      this.flying = false;
      s.inFlight = this.plan !== undefined;
      this.notify();
      if (this.plan) void this.pump();
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `service error ${err.status}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
