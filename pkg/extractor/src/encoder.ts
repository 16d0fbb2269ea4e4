/**
 * Pluggable embedding backends.
 *
 * The extractor only needs something that maps images and prompt strings
 * into one shared unit-sphere space. ToyColorEncoder is a deterministic,
 * dependency-free stand-in whose image and text embeddings are genuinely
 * aligned through a common low-level feature space (color statistics), so
 * zero-shot prediction over color-themed classes works end to end.
 * HttpEncoder delegates to an embedding service for real models.
 */

import { RgbImage } from "./image.js";
import { Rng, fnv1a, substream } from "./prng.js";

export interface Encoder {
  readonly name: string;
  readonly dim: number;
  readonly temperature: number;
  encodeImage(img: RgbImage): Promise<Float64Array>;
  /** Embed a full prompt; className, when known, names the filled slot. */
  encodeText(prompt: string, className?: string): Promise<Float64Array>;
}

export function l2Normalize(v: Float64Array): Float64Array {
  let sq = 0;
  for (let i = 0; i < v.length; i++) sq += v[i] * v[i];
  const norm = Math.sqrt(sq);
  if (norm < 1e-12) throw new Error("cannot normalize a zero vector");
  const out = new Float64Array(v.length);
  for (let i = 0; i < v.length; i++) out[i] = v[i] / norm;
  return out;
}

const FEATURE_DIM = 16; // mean rgb (3) + std rgb (3) + hue hist (8) + sat + luma

const COLOR_WORDS: Record<string, [number, number, number]> = {
  red: [0.85, 0.12, 0.12],
  green: [0.12, 0.8, 0.15],
  blue: [0.12, 0.2, 0.85],
  yellow: [0.85, 0.82, 0.1],
  cyan: [0.1, 0.8, 0.82],
  magenta: [0.82, 0.12, 0.8],
  orange: [0.9, 0.55, 0.1],
  purple: [0.5, 0.15, 0.65],
  white: [0.92, 0.92, 0.92],
  gray: [0.5, 0.5, 0.5],
  black: [0.08, 0.08, 0.08],
};

function hueBin(r: number, g: number, b: number): number {
  const max = Math.max(r, g, b);
  const min = Math.min(r, g, b);
  if (max - min < 1e-6) return 0; // achromatic pixels share bin 0
  let hue: number;
  if (max === r) hue = ((g - b) / (max - min)) % 6;
  else if (max === g) hue = (b - r) / (max - min) + 2;
  else hue = (r - g) / (max - min) + 4;
  hue = ((hue * 60 + 360) % 360) / 360;
  return Math.min(7, Math.floor(hue * 8));
}

function imageFeatures(img: RgbImage): Float64Array {
  const n = img.width * img.height;
  const mean = [0, 0, 0];
  const sq = [0, 0, 0];
  const hist = new Float64Array(8);
  let sat = 0;
  let luma = 0;
  for (let i = 0; i < n; i++) {
    const r = img.data[i * 3] / 255;
    const g = img.data[i * 3 + 1] / 255;
    const b = img.data[i * 3 + 2] / 255;
    mean[0] += r;
    mean[1] += g;
    mean[2] += b;
    sq[0] += r * r;
    sq[1] += g * g;
    sq[2] += b * b;
    hist[hueBin(r, g, b)] += 1;
    sat += Math.max(r, g, b) - Math.min(r, g, b);
    luma += 0.299 * r + 0.587 * g + 0.114 * b;
  }
  const f = new Float64Array(FEATURE_DIM);
  for (let c = 0; c < 3; c++) {
    f[c] = mean[c] / n;
    f[3 + c] = Math.sqrt(Math.max(0, sq[c] / n - f[c] * f[c]));
  }
  for (let h = 0; h < 8; h++) f[6 + h] = hist[h] / n;
  f[14] = sat / n;
  f[15] = luma / n;
  return f;
}

function colorForText(text: string): [number, number, number] {
  const lower = text.toLowerCase();
  for (const [word, rgb] of Object.entries(COLOR_WORDS)) {
    if (lower.includes(word)) return rgb;
  }
  // unknown concept: a stable pseudo-color so distinct classes stay distinct
  const r = new Rng(`color:${lower}`);
  return [r.next(), r.next(), r.next()];
}

function textFeatures(prompt: string, className?: string): Float64Array {
  const concept = className ?? prompt;
  const [r, g, b] = colorForText(concept);
  const f = new Float64Array(FEATURE_DIM);
  f[0] = r;
  f[1] = g;
  f[2] = b;
  // synthetic photos carry pixel noise; quote a matching spread
  f[3] = f[4] = f[5] = 0.08;
  f[6 + hueBin(r, g, b)] = 1.0;
  f[14] = Math.max(r, g, b) - Math.min(r, g, b);
  f[15] = 0.299 * r + 0.587 * g + 0.114 * b;
  // template wording shifts the embedding slightly, like a real text encoder
  const wording = className ? prompt.split(className).join("{}") : prompt;
  const jitter = new Rng(`template:${wording}`);
  for (let i = 0; i < FEATURE_DIM; i++) f[i] += 0.02 * jitter.gauss();
  return f;
}

export class ToyColorEncoder implements Encoder {
  readonly name = "toy";
  readonly dim: number;
  readonly temperature: number;
  private readonly projection: Float64Array; // dim x FEATURE_DIM, fixed by seed

  constructor(dim = 32, temperature = 60.0, seed = "toy-encoder-v1") {
    this.dim = dim;
    this.temperature = temperature;
    const rng = substream(seed, "projection");
    this.projection = new Float64Array(dim * FEATURE_DIM);
    for (let i = 0; i < this.projection.length; i++) this.projection[i] = rng.gauss();
  }

  private project(features: Float64Array): Float64Array {
    const out = new Float64Array(this.dim);
    for (let i = 0; i < this.dim; i++) {
      let acc = 0;
      for (let j = 0; j < FEATURE_DIM; j++) {
        acc += this.projection[i * FEATURE_DIM + j] * features[j];
      }
      out[i] = acc;
    }
    return l2Normalize(out);
  }

  encodeImage(img: RgbImage): Promise<Float64Array> {
    return Promise.resolve(this.project(imageFeatures(img)));
  }

  encodeText(prompt: string, className?: string): Promise<Float64Array> {
    return Promise.resolve(this.project(textFeatures(prompt, className)));
  }
}

export interface HttpEncoderOptions {
  endpoint: string;
  dim: number;
  temperature?: number;
}

/** Client for an embedding service speaking a small JSON protocol. */
export class HttpEncoder implements Encoder {
  readonly name = "http";
  readonly dim: number;
  readonly temperature: number;
  private readonly endpoint: string;

  constructor(opts: HttpEncoderOptions) {
    this.endpoint = opts.endpoint;
    this.dim = opts.dim;
    this.temperature = opts.temperature ?? 100.0;
  }

  private async call(payload: object): Promise<Float64Array> {
    const res = await fetch(this.endpoint, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!res.ok) throw new Error(`embedding service returned ${res.status}`);
    const body = (await res.json()) as { embedding: number[] };
    if (!Array.isArray(body.embedding) || body.embedding.length !== this.dim) {
      throw new Error("embedding service returned a malformed vector");
    }
    return l2Normalize(Float64Array.from(body.embedding));
  }

  encodeImage(img: RgbImage): Promise<Float64Array> {
    return this.call({
      kind: "image",
      width: img.width,
      height: img.height,
      rgb_base64: Buffer.from(img.data).toString("base64"),
    });
  }

  encodeText(prompt: string): Promise<Float64Array> {
    return this.call({ kind: "text", text: prompt });
  }
}

export function makeEncoder(kind: string, opts: { dim?: number; endpoint?: string } = {}): Encoder {
  if (kind === "toy") return new ToyColorEncoder(opts.dim ?? 32);
  if (kind === "http") {
    if (!opts.endpoint) throw new Error("http encoder needs --endpoint");
    return new HttpEncoder({ endpoint: opts.endpoint, dim: opts.dim ?? 512 });
  }
  throw new Error(`unknown encoder '${kind}' (expected toy or http)`);
}
