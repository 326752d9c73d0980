// Typed client for the rendering service. Every preview shown by the
// UI comes back through one of these calls.

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface UploadedImage {
  imageId: string;
  width: number;
  height: number;
}

export interface RenderRequest {
  imageId: string;
  alpha?: number;
  lcmId?: string;
  passes?: number;
}

async function raise(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

/** The slice of the service the controller depends on. */
export interface RenderService {
  uploadImage(png: Uint8Array): Promise<UploadedImage>;
  uploadLcm(imageId: string, png: Uint8Array): Promise<string>;
  render(request: RenderRequest): Promise<Uint8Array>;
  imageUrl(imageId: string): string;
  etfUrl(imageId: string): string;
}

export class ServiceClient implements RenderService {
  constructor(readonly baseUrl = "") {}

  async health(): Promise<{ status: string; version: string }> {
    const resp = await fetch(`${this.baseUrl}/api/health`);
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async uploadImage(png: Uint8Array): Promise<UploadedImage> {
    const resp = await fetch(`${this.baseUrl}/api/images`, {
      method: "POST",
      headers: { "content-type": "image/png" },
      body: png.slice(),
    });
    if (!resp.ok) await raise(resp);
    const body = (await resp.json()) as {
      image_id: string;
      width: number;
      height: number;
    };
    return { imageId: body.image_id, width: body.width, height: body.height };
  }

  imageUrl(imageId: string): string {
    return `${this.baseUrl}/api/images/${imageId}`;
  }

  etfUrl(imageId: string): string {
    return `${this.baseUrl}/api/images/${imageId}/etf`;
  }

  async fetchEtfPng(imageId: string): Promise<Uint8Array> {
    const resp = await fetch(this.etfUrl(imageId));
    if (!resp.ok) await raise(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }

  async uploadLcm(imageId: string, png: Uint8Array): Promise<string> {
    const resp = await fetch(
      `${this.baseUrl}/api/lcm?image_id=${encodeURIComponent(imageId)}`,
      {
        method: "POST",
        headers: { "content-type": "image/png" },
        body: png.slice(),
      },
    );
    if (!resp.ok) await raise(resp);
    const body = (await resp.json()) as { lcm_id: string };
    return body.lcm_id;
  }

  async render(request: RenderRequest): Promise<Uint8Array> {
    const payload: Record<string, unknown> = { image_id: request.imageId };
    if (request.alpha !== undefined) payload.alpha = request.alpha;
    if (request.lcmId !== undefined) payload.lcm_id = request.lcmId;
    if (request.passes !== undefined) payload.passes = request.passes;
    const resp = await fetch(`${this.baseUrl}/api/render`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!resp.ok) await raise(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }
}
