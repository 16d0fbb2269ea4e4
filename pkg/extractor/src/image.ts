/**
 * Minimal raster handling: PNG and binary PPM (P6) loading, cropping, and
 * bilinear resizing. Everything operates on packed 8-bit RGB.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { PNG } from "pngjs";

import { Rng } from "./prng.js";

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major packed RGB, length = width * height * 3. */
  data: Uint8Array;
}

export function decodePpm(buf: Buffer): RgbImage {
  // P6 <width> <height> <maxval>\n followed by raw RGB
  let pos = 0;
  const token = (): string => {
    while (pos < buf.length && /\s/.test(String.fromCharCode(buf[pos]))) pos++;
    if (buf[pos] === 0x23) {
      // comment line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      return token();
    }
    const start = pos;
    while (pos < buf.length && !/\s/.test(String.fromCharCode(buf[pos]))) pos++;
    return buf.subarray(start, pos).toString("ascii");
  };
  const magic = token();
  if (magic !== "P6") throw new Error(`not a binary PPM: magic ${magic}`);
  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  const maxval = parseInt(token(), 10);
  if (!(width > 0 && height > 0)) throw new Error("bad PPM dimensions");
  if (maxval !== 255) throw new Error(`unsupported PPM maxval ${maxval}`);
  pos++; // single whitespace after maxval
  const need = width * height * 3;
  const data = buf.subarray(pos, pos + need);
  if (data.length !== need) throw new Error("truncated PPM payload");
  return { width, height, data: new Uint8Array(data) };
}

export function encodePpm(img: RgbImage): Buffer {
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.data)]);
}

export function decodePng(buf: Buffer): RgbImage {
  const png = PNG.sync.read(buf);
  const data = new Uint8Array(png.width * png.height * 3);
  for (let i = 0, j = 0; i < png.data.length; i += 4, j += 3) {
    data[j] = png.data[i];
    data[j + 1] = png.data[i + 1];
    data[j + 2] = png.data[i + 2];
  }
  return { width: png.width, height: png.height, data };
}

export function encodePng(img: RgbImage): Buffer {
  const png = new PNG({ width: img.width, height: img.height });
  for (let i = 0, j = 0; j < img.data.length; i += 4, j += 3) {
    png.data[i] = img.data[j];
    png.data[i + 1] = img.data[j + 1];
    png.data[i + 2] = img.data[j + 2];
    png.data[i + 3] = 255;
  }
  return PNG.sync.write(png);
}

export function loadImage(path: string): RgbImage {
  const buf = readFileSync(path);
  if (path.toLowerCase().endsWith(".png")) return decodePng(buf);
  if (path.toLowerCase().endsWith(".ppm")) return decodePpm(buf);
  throw new Error(`unsupported image format: ${path} (expected .png or .ppm)`);
}

export function saveImage(path: string, img: RgbImage): void {
  if (path.toLowerCase().endsWith(".png")) writeFileSync(path, encodePng(img));
  else if (path.toLowerCase().endsWith(".ppm")) writeFileSync(path, encodePpm(img));
  else throw new Error(`unsupported image format: ${path}`);
}

export function crop(img: RgbImage, x: number, y: number, w: number, h: number): RgbImage {
  if (x < 0 || y < 0 || x + w > img.width || y + h > img.height) {
    throw new Error("crop window out of bounds");
  }
  const data = new Uint8Array(w * h * 3);
  for (let row = 0; row < h; row++) {
    const src = ((y + row) * img.width + x) * 3;
    data.set(img.data.subarray(src, src + w * 3), row * w * 3);
  }
  return { width: w, height: h, data };
}

export function resizeBilinear(img: RgbImage, w: number, h: number): RgbImage {
  const data = new Uint8Array(w * h * 3);
  const sx = img.width / w;
  const sy = img.height / h;
  for (let oy = 0; oy < h; oy++) {
    const fy = Math.min((oy + 0.5) * sy - 0.5, img.height - 1);
    const y0 = Math.max(0, Math.floor(fy));
    const y1 = Math.min(img.height - 1, y0 + 1);
    const wy = fy - y0;
    for (let ox = 0; ox < w; ox++) {
      const fx = Math.min((ox + 0.5) * sx - 0.5, img.width - 1);
      const x0 = Math.max(0, Math.floor(fx));
      const x1 = Math.min(img.width - 1, x0 + 1);
      const wx = fx - x0;
      for (let c = 0; c < 3; c++) {
        const p00 = img.data[(y0 * img.width + x0) * 3 + c];
        const p01 = img.data[(y0 * img.width + x1) * 3 + c];
        const p10 = img.data[(y1 * img.width + x0) * 3 + c];
        const p11 = img.data[(y1 * img.width + x1) * 3 + c];
        const top = p00 + (p01 - p00) * wx;
        const bot = p10 + (p11 - p10) * wx;
        data[(oy * w + ox) * 3 + c] = Math.round(top + (bot - top) * wy);
      }
    }
  }
  return { width: w, height: h, data };
}

export interface CropParams {
  /** Area fraction range of the source image. */
  scale: [number, number];
  /** Aspect ratio (w/h) range. */
  ratio: [number, number];
}

export const DEFAULT_CROP: CropParams = { scale: [0.5, 1.0], ratio: [3 / 4, 4 / 3] };

/**
 * Random area/aspect crop resized back to the source size. Falls back to a
 * centered maximal window when a sampled geometry does not fit.
 */
export function randomResizedCrop(img: RgbImage, rng: Rng, params: CropParams = DEFAULT_CROP): RgbImage {
  const area = img.width * img.height;
  for (let attempt = 0; attempt < 10; attempt++) {
    const targetArea = area * rng.uniform(params.scale[0], params.scale[1]);
    const logRatio = rng.uniform(Math.log(params.ratio[0]), Math.log(params.ratio[1]));
    const ratio = Math.exp(logRatio);
    const w = Math.round(Math.sqrt(targetArea * ratio));
    const h = Math.round(Math.sqrt(targetArea / ratio));
    if (w < 1 || h < 1 || w > img.width || h > img.height) continue;
    const x = rng.int(img.width - w + 1);
    const y = rng.int(img.height - h + 1);
    return resizeBilinear(crop(img, x, y, w, h), img.width, img.height);
  }
  const side = Math.min(img.width, img.height);
  const x = Math.floor((img.width - side) / 2);
  const y = Math.floor((img.height - side) / 2);
  return resizeBilinear(crop(img, x, y, side, side), img.width, img.height);
}
