/**
 * The generation wire contract, implemented deterministically.
 *
 * POST /v1/generate takes a condition image (plus, for inpaint mode, a base
 * frame and a latent-space keep mask) and returns a PNG frame. "Generation"
 * is a pure pixel transform of the condition chosen by hashing seed+prompt,
 * so the response depends only on the request bytes. Kept pixels (mask 1,
 * upsampled nearest-neighbor by latent_factor) echo the base frame exactly,
 * mirroring the client-side contract.
 *
 * Status codes: 400 malformed body/base64/PNG, 422 dimension inconsistencies.
 */

import express, { Express, Request, Response } from "express";

import { CodecError, decodeB64, decodePng, encodePng, Rgb } from "./codec";
import { pickTransform } from "./transforms";

interface GenerateBody {
  mode: "full" | "inpaint";
  prompt: string;
  seed: number;
  steps?: number;
  width: number;
  height: number;
  condition_png_b64: string;
  base_png_b64?: string;
  mask_b64?: string;
  latent_factor?: number;
}

class BadRequest extends Error {
  constructor(message: string, readonly status: 400 | 422 = 400) {
    super(message);
  }
}

function requireField(body: Record<string, unknown>, field: string): unknown {
  const value = body[field];
  if (value === undefined || value === null) {
    throw new BadRequest(`missing required field: ${field}`);
  }
  return value;
}

function parseBody(raw: Record<string, unknown>): GenerateBody {
  const mode = requireField(raw, "mode");
  if (mode !== "full" && mode !== "inpaint") {
    throw new BadRequest(`mode must be "full" or "inpaint", got ${JSON.stringify(mode)}`);
  }
  const width = requireField(raw, "width");
  const height = requireField(raw, "height");
  if (!Number.isInteger(width) || !Number.isInteger(height) || (width as number) < 1 || (height as number) < 1) {
    throw new BadRequest("width and height must be positive integers");
  }
  const condition = requireField(raw, "condition_png_b64");
  const body: GenerateBody = {
    mode,
    prompt: typeof raw.prompt === "string" ? raw.prompt : "",
    seed: Number.isInteger(raw.seed) ? (raw.seed as number) : 0,
    steps: Number.isInteger(raw.steps) ? (raw.steps as number) : 20,
    width: width as number,
    height: height as number,
    condition_png_b64: condition as string,
  };
  if ((body.steps ?? 20) < 1) {
    throw new BadRequest("steps must be >= 1");
  }
  if (mode === "inpaint") {
    body.base_png_b64 = requireField(raw, "base_png_b64") as string;
    body.mask_b64 = requireField(raw, "mask_b64") as string;
    const factor = requireField(raw, "latent_factor");
    if (!Number.isInteger(factor) || (factor as number) < 1) {
      throw new BadRequest("latent_factor must be a positive integer");
    }
    body.latent_factor = factor as number;
  }
  return body;
}

function upsampleMask(mask: Buffer, latentW: number, latentH: number,
                      factor: number, width: number, height: number): Uint8Array {
  const out = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    const ly = Math.min(Math.floor(y / factor), latentH - 1);
    for (let x = 0; x < width; x++) {
      const lx = Math.min(Math.floor(x / factor), latentW - 1);
      out[y * width + x] = mask[ly * latentW + lx];
    }
  }
  return out;
}

function generate(body: GenerateBody): Rgb {
  const condition = decodePng(decodeB64(body.condition_png_b64, "condition_png_b64"), "condition_png_b64");
  if (condition.width !== body.width || condition.height !== body.height) {
    throw new BadRequest(
      `condition is ${condition.width}x${condition.height}, request says ${body.width}x${body.height}`,
      422);
  }
  const transform = pickTransform(body.seed, body.prompt);
  const styled: Rgb = {
    width: condition.width,
    height: condition.height,
    rgb: transform.fn(condition.rgb, condition.width, condition.height),
  };
  if (body.mode === "full") {
    return styled;
  }

  const base = decodePng(decodeB64(body.base_png_b64!, "base_png_b64"), "base_png_b64");
  if (base.width !== condition.width || base.height !== condition.height) {
    throw new BadRequest(
      `base is ${base.width}x${base.height}, condition is ${condition.width}x${condition.height}`,
      422);
  }
  const factor = body.latent_factor!;
  const latentW = Math.ceil(body.width / factor);
  const latentH = Math.ceil(body.height / factor);
  const mask = decodeB64(body.mask_b64!, "mask_b64");
  if (mask.length !== latentW * latentH) {
    throw new BadRequest(
      `mask has ${mask.length} bytes, expected ${latentW * latentH} for ` +
      `${latentW}x${latentH} latent cells`, 422);
  }
  for (const byte of mask) {
    if (byte !== 0 && byte !== 1) {
      throw new BadRequest("mask_b64 must contain only 0/1 bytes");
    }
  }

  const keep = upsampleMask(mask, latentW, latentH, factor, body.width, body.height);
  const rgb = Buffer.alloc(base.rgb.length);
  for (let p = 0; p < body.width * body.height; p++) {
    const src = keep[p] === 1 ? base.rgb : styled.rgb;
    rgb[p * 3] = src[p * 3];
    rgb[p * 3 + 1] = src[p * 3 + 1];
    rgb[p * 3 + 2] = src[p * 3 + 2];
  }
  return { width: body.width, height: body.height, rgb };
}

export function buildApp(): Express {
  const app = express();
  app.use(express.json({ limit: "64mb" }));

  app.get("/healthz", (_req: Request, res: Response) => {
    res.status(200).json({ status: "ok" });
  });

  app.post("/v1/generate", (req: Request, res: Response) => {
    try {
      const body = parseBody(req.body ?? {});
      const frame = generate(body);
      res.status(200).json({ frame_png_b64: encodePng(frame).toString("base64") });
    } catch (err) {
      if (err instanceof BadRequest) {
        res.status(err.status).json({ error: err.message });
      } else if (err instanceof CodecError) {
        res.status(400).json({ error: err.message });
      } else {
        res.status(500).json({ error: `internal: ${(err as Error).message}` });
      }
    }
  });

  return app;
}
