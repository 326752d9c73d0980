// Browser entry point: binds the controller to the static page served
// by the drawing service. All rendering happens server-side; this file
// only moves bytes and pixels between DOM widgets and the controller.

import { ServiceClient } from "./api.js";
import { UiController } from "./controller.js";
import { UiState } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const fileInput = byId<HTMLInputElement>("file-input");
const alphaSlider = byId<HTMLInputElement>("alpha-slider");
const alphaReadout = byId<HTMLSpanElement>("alpha-readout");
const modeGlobal = byId<HTMLInputElement>("mode-global");
const modePaint = byId<HTMLInputElement>("mode-paint");
const brushRadius = byId<HTMLInputElement>("brush-radius");
const brushValue = byId<HTMLInputElement>("brush-value");
const sourceImg = byId<HTMLImageElement>("source-view");
const etfImg = byId<HTMLImageElement>("etf-view");
const previewImg = byId<HTMLImageElement>("preview-view");
const lcmCanvas = byId<HTMLCanvasElement>("lcm-canvas");
const exportButton = byId<HTMLButtonElement>("export-button");
const retryButton = byId<HTMLButtonElement>("retry-button");
const statusLine = byId<HTMLDivElement>("status-line");
const errorLine = byId<HTMLDivElement>("error-line");

const controller = new UiController({
  client: new ServiceClient(""),
  makeUrl: (bytes) =>
    URL.createObjectURL(new Blob([bytes.slice().buffer], { type: "image/png" })),
  releaseUrl: (url) => URL.revokeObjectURL(url),
  onChange: sync,
});

function sync(state: UiState): void {
  const hasImage = state.imageId !== undefined;
  alphaSlider.disabled = !hasImage;
  modePaint.disabled = !hasImage;
  exportButton.disabled = state.preview === undefined;
  retryButton.hidden = state.lastError === undefined;
  errorLine.textContent = state.lastError ?? "";
  statusLine.textContent = state.inFlight
    ? "rendering…"
    : hasImage
      ? "ready"
      : "upload an image to begin";
  alphaReadout.textContent = state.globalAlpha.toFixed(2);
  if (state.sourceUrl) sourceImg.src = state.sourceUrl;
  if (state.etfUrl) etfImg.src = state.etfUrl;
  if (state.preview) previewImg.src = state.preview.url;
  drawLcm(state);
}

function drawLcm(state: UiState): void {
  const raster = state.lcmCanvas;
  if (!raster) return;
  if (lcmCanvas.width !== raster.width || lcmCanvas.height !== raster.height) {
    lcmCanvas.width = raster.width;
    lcmCanvas.height = raster.height;
  }
  const ctx = lcmCanvas.getContext("2d");
  if (!ctx) return;
  const image = ctx.createImageData(raster.width, raster.height);
  for (let i = 0; i < raster.data.length; i++) {
    const v = raster.data[i];
    image.data[4 * i] = v;
    image.data[4 * i + 1] = v;
    image.data[4 * i + 2] = v;
    image.data[4 * i + 3] = 255;
  }
  ctx.putImageData(image, 0, 0);
}

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  const bytes = new Uint8Array(await file.arrayBuffer());
  await controller.uploadFlow(bytes);
});

alphaSlider.addEventListener("input", () => {
  controller.slider(Number(alphaSlider.value));
});

modeGlobal.addEventListener("change", () => {
  if (modeGlobal.checked) controller.setMode("global");
});
modePaint.addEventListener("change", () => {
  if (modePaint.checked) controller.setMode("paint");
});

function syncBrush(): void {
  controller.setBrush(Number(brushRadius.value), Number(brushValue.value));
}
brushRadius.addEventListener("input", syncBrush);
brushValue.addEventListener("input", syncBrush);

// Pointer painting: map client coordinates onto raster pixels. The
// canvas is displayed at CSS size, so scale by the bounding rect.
let painting = false;

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const rect = lcmCanvas.getBoundingClientRect();
  const x = ((event.clientX - rect.left) / rect.width) * lcmCanvas.width;
  const y = ((event.clientY - rect.top) / rect.height) * lcmCanvas.height;
  return { x: Math.floor(x), y: Math.floor(y) };
}

lcmCanvas.addEventListener("pointerdown", (event) => {
  painting = true;
  lcmCanvas.setPointerCapture(event.pointerId);
  const { x, y } = canvasPoint(event);
  controller.brushStroke(x, y);
});
lcmCanvas.addEventListener("pointermove", (event) => {
  if (!painting) return;
  const { x, y } = canvasPoint(event);
  controller.brushStroke(x, y);
});
lcmCanvas.addEventListener("pointerup", (event) => {
  painting = false;
  lcmCanvas.releasePointerCapture(event.pointerId);
});

retryButton.addEventListener("click", () => controller.retry());

function download(bytes: Uint8Array, name: string): void {
  const url = URL.createObjectURL(
    new Blob([bytes.slice().buffer], { type: "image/png" }),
  );
  const a = document.createElement("a");
  a.href = url;
  a.download = name;
  a.click();
  URL.revokeObjectURL(url);
}

exportButton.addEventListener("click", () => {
  const artifacts = controller.exportArtifacts();
  download(artifacts.drawing, "drawing.png");
  if (artifacts.lcm) download(artifacts.lcm, "control-matrix.png");
});

sync(controller.state);
