/** PNG and base64 helpers for the wire contract (8-bit RGB throughout). */

import { PNG } from "pngjs";

const B64_RE = /^[A-Za-z0-9+/]*={0,2}$/;

export class CodecError extends Error {}

export function decodeB64(value: string, field: string): Buffer {
  if (typeof value !== "string" || value.length % 4 !== 0 || !B64_RE.test(value)) {
    throw new CodecError(`${field} is not valid base64`);
  }
  return Buffer.from(value, "base64");
}

export interface Rgb {
  width: number;
  height: number;
  rgb: Buffer; // 3 bytes per pixel, row-major
}

export function decodePng(blob: Buffer, field: string): Rgb {
  let png: PNG;
  try {
    png = PNG.sync.read(blob);
  } catch (err) {
    throw new CodecError(`${field} is not a decodable PNG: ${(err as Error).message}`);
  }
  const rgb = Buffer.alloc(png.width * png.height * 3);
  for (let p = 0; p < png.width * png.height; p++) {
    rgb[p * 3] = png.data[p * 4];
    rgb[p * 3 + 1] = png.data[p * 4 + 1];
    rgb[p * 3 + 2] = png.data[p * 4 + 2];
  }
  return { width: png.width, height: png.height, rgb };
}

export function encodePng(image: Rgb): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  for (let p = 0; p < image.width * image.height; p++) {
    png.data[p * 4] = image.rgb[p * 3];
    png.data[p * 4 + 1] = image.rgb[p * 3 + 1];
    png.data[p * 4 + 2] = image.rgb[p * 3 + 2];
    png.data[p * 4 + 3] = 255;
  }
  // fixed encoder settings keep responses byte-deterministic
  return PNG.sync.write(png, { deflateLevel: 9, deflateStrategy: 0 });
}
