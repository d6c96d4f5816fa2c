/**
 * Deterministic pixel transforms standing in for a real generation model.
 *
 * A request's (seed, prompt) pair picks one transform from the table via a
 * stable hash, so identical requests always produce identical frames while
 * different prompts/seeds still exercise different code paths.
 */

export type PixelTransform = (rgb: Buffer, width: number, height: number) => Buffer;

function mapPixels(rgb: Buffer, fn: (r: number, g: number, b: number) => [number, number, number]): Buffer {
  const out = Buffer.alloc(rgb.length);
  for (let i = 0; i < rgb.length; i += 3) {
    const [r, g, b] = fn(rgb[i], rgb[i + 1], rgb[i + 2]);
    out[i] = r;
    out[i + 1] = g;
    out[i + 2] = b;
  }
  return out;
}

const clamp8 = (v: number) => Math.max(0, Math.min(255, Math.round(v)));

export const TRANSFORMS: { name: string; fn: PixelTransform }[] = [
  { name: "identity", fn: (rgb) => Buffer.from(rgb) },
  { name: "invert", fn: (rgb) => mapPixels(rgb, (r, g, b) => [255 - r, 255 - g, 255 - b]) },
  { name: "rotate", fn: (rgb) => mapPixels(rgb, (r, g, b) => [g, b, r]) },
  {
    name: "sepia",
    fn: (rgb) =>
      mapPixels(rgb, (r, g, b) => [
        clamp8(0.393 * r + 0.769 * g + 0.189 * b),
        clamp8(0.349 * r + 0.686 * g + 0.168 * b),
        clamp8(0.272 * r + 0.534 * g + 0.131 * b),
      ]),
  },
];

/** FNV-1a over `${seed}:${prompt}`; stable across runs and platforms. */
export function pickTransform(seed: number, prompt: string): { name: string; fn: PixelTransform } {
  const key = `${seed}:${prompt}`;
  let h = 0x811c9dc5;
  for (let i = 0; i < key.length; i++) {
    h ^= key.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return TRANSFORMS[h % TRANSFORMS.length];
}
