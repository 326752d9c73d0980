// Minimal 8-bit grayscale PNG codec. Encoding covers exactly what the
// control-matrix export needs (color type 0, bit depth 8, filter 0);
// decoding additionally understands all five scanline filters so
// server renders can be compared pixel by pixel in tests.

const SIGNATURE = new Uint8Array([137, 80, 78, 71, 13, 10, 26, 10]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) {
    c = CRC_TABLE[(c ^ bytes[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function concat(parts: Uint8Array[]): Uint8Array {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

async function pipeThrough(
  data: Uint8Array,
  stream: CompressionStream | DecompressionStream,
): Promise<Uint8Array> {
  const writer = stream.writable.getWriter();
  void writer.write(data.slice());
  void writer.close();
  const chunks: Uint8Array[] = [];
  const reader = stream.readable.getReader();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) break;
    chunks.push(value);
  }
  return concat(chunks);
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + data.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, data.length);
  for (let i = 0; i < 4; i++) {
    out[4 + i] = type.charCodeAt(i);
  }
  out.set(data, 8);
  view.setUint32(8 + data.length, crc32(out.subarray(4, 8 + data.length)));
  return out;
}

export async function encodeGrayPng(
  width: number,
  height: number,
  pixels: Uint8Array,
): Promise<Uint8Array> {
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error(`bad dimensions ${width}x${height}`);
  }
  if (pixels.length !== width * height) {
    throw new Error(`expected ${width * height} pixels, got ${pixels.length}`);
  }
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // color type: grayscale
  // compression, filter, interlace stay 0

  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    // filter byte 0 (None), then the scanline
    raw.set(pixels.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  const idat = await pipeThrough(raw, new CompressionStream("deflate"));
  return concat([
    SIGNATURE,
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export interface GrayImage {
  width: number;
  height: number;
  pixels: Uint8Array;
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

export async function decodeGrayPng(bytes: Uint8Array): Promise<GrayImage> {
  if (bytes.length < 8 || !SIGNATURE.every((v, i) => bytes[i] === v)) {
    throw new Error("bad PNG signature");
  }
  let width = 0;
  let height = 0;
  let sawHeader = false;
  let sawEnd = false;
  const idatParts: Uint8Array[] = [];
  let offset = 8;
  while (offset + 12 <= bytes.length) {
    const view = new DataView(bytes.buffer, bytes.byteOffset + offset);
    const length = view.getUint32(0);
    const type = String.fromCharCode(...bytes.subarray(offset + 4, offset + 8));
    if (offset + 12 + length > bytes.length) {
      throw new Error(`truncated ${type} chunk`);
    }
    const data = bytes.subarray(offset + 8, offset + 8 + length);
    const stored = new DataView(
      bytes.buffer,
      bytes.byteOffset + offset + 8 + length,
    ).getUint32(0);
    if (crc32(bytes.subarray(offset + 4, offset + 8 + length)) !== stored) {
      throw new Error(`bad CRC in ${type} chunk`);
    }
    if (type === "IHDR") {
      const h = new DataView(bytes.buffer, bytes.byteOffset + offset + 8);
      width = h.getUint32(0);
      height = h.getUint32(4);
      const bitDepth = data[8];
      const colorType = data[9];
      if (bitDepth !== 8 || colorType !== 0 || data[12] !== 0) {
        throw new Error(
          `unsupported PNG flavor (depth ${bitDepth}, color ${colorType})`,
        );
      }
      sawHeader = true;
    } else if (type === "IDAT") {
      idatParts.push(data);
    } else if (type === "IEND") {
      sawEnd = true;
      break;
    }
    offset += 12 + length;
  }
  if (!sawHeader || idatParts.length === 0) {
    throw new Error("missing IHDR or IDAT");
  }
  if (!sawEnd) {
    throw new Error("truncated PNG: no IEND chunk");
  }

  const raw = await pipeThrough(concat(idatParts), new DecompressionStream("deflate"));
  const stride = width + 1;
  if (raw.length !== height * stride) {
    throw new Error(`decompressed to ${raw.length} bytes, expected ${height * stride}`);
  }
  const pixels = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * stride];
    const line = raw.subarray(y * stride + 1, (y + 1) * stride);
    const row = y * width;
    const prev = row - width;
    for (let x = 0; x < width; x++) {
      const a = x > 0 ? pixels[row + x - 1] : 0;
      const b = y > 0 ? pixels[prev + x] : 0;
      const c = x > 0 && y > 0 ? pixels[prev + x - 1] : 0;
      let v = line[x];
      switch (filter) {
        case 0:
          break;
        case 1:
          v += a;
          break;
        case 2:
          v += b;
          break;
        case 3:
          v += (a + b) >> 1;
          break;
        case 4:
          v += paeth(a, b, c);
          break;
        default:
          throw new Error(`unknown scanline filter ${filter}`);
      }
      pixels[row + x] = v & 0xff;
    }
  }
  return { width, height, pixels };
}
