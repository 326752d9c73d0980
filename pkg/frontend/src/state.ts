// UI state model. The controller owns one of these and mutates it
// through well-defined transitions; views only read it.

import { LcmRaster } from "./raster.js";

export type Mode = "global" | "paint";

export interface Brush {
  radius: number;
  value: number;
}

export interface Preview {
  bytes: Uint8Array;
  url: string;
  /** PNG of the control matrix this preview was rendered from (paint mode only). */
  lcmPng?: Uint8Array;
}

export interface UiState {
  imageId?: string;
  imageWidth: number;
  imageHeight: number;
  globalAlpha: number;
  lcmCanvas?: LcmRaster;
  brush: Brush;
  mode: Mode;
  preview?: Preview;
  etfUrl?: string;
  sourceUrl?: string;
  inFlight: boolean;
  lastError?: string;
}

export function initialState(): UiState {
  return {
    imageWidth: 0,
    imageHeight: 0,
    globalAlpha: 0.5,
    brush: { radius: 12, value: 0.9 },
    mode: "global",
    inFlight: false,
  };
}

export function clampAlpha(value: number): number {
  if (!Number.isFinite(value)) return 0.5;
  return Math.min(1, Math.max(0, value));
}

export function canPaint(state: UiState): boolean {
  return state.imageId !== undefined && state.lcmCanvas !== undefined;
}

export function canExport(state: UiState): boolean {
  return state.preview !== undefined;
}
