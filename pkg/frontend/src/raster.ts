// Client-side control-matrix raster: an 8-bit grayscale buffer the
// brush paints into, exported as the exact PNG the service receives.

import { encodeGrayPng } from "./png.js";

export function quantize(value: number): number {
  if (!Number.isFinite(value) || value < 0 || value > 1) {
    throw new Error(`control value ${value} outside [0, 1]`);
  }
  return Math.round(value * 255);
}

export class LcmRaster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, fillValue = 0.5) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
      throw new Error(`bad raster size ${width}x${height}`);
    }
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height);
    this.fill(fillValue);
  }

  fill(value: number): void {
    this.data.fill(quantize(value));
  }

  /** Stamp a filled circle; coordinates may fall partly outside. */
  stamp(cx: number, cy: number, radius: number, value: number): void {
    if (!(radius > 0)) {
      throw new Error(`brush radius must be positive, got ${radius}`);
    }
    const q = quantize(value);
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(this.width - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(this.height - 1, Math.ceil(cy + radius));
    const r2 = radius * radius;
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy <= r2) {
          this.data[y * this.width + x] = q;
        }
      }
    }
  }

  /** Paint every pixel with x >= splitCol (or < splitCol) in one call. */
  fillHalf(side: "left" | "right", splitCol: number, value: number): void {
    const q = quantize(value);
    for (let y = 0; y < this.height; y++) {
      const row = y * this.width;
      const from = side === "left" ? 0 : splitCol;
      const to = side === "left" ? splitCol : this.width;
      this.data.fill(q, row + from, row + to);
    }
  }

  valueAt(x: number, y: number): number {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) {
      throw new Error(`(${x}, ${y}) outside ${this.width}x${this.height}`);
    }
    return this.data[y * this.width + x] / 255;
  }

  toPng(): Promise<Uint8Array> {
    return encodeGrayPng(this.width, this.height, this.data);
  }
}
