/**
 * Demo corpus generator: noisy solid-color photos across color classes,
 * plus a manifest. Gives the pipeline a local image set for smoke tests and
 * first runs without shipping binary assets.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { RgbImage, saveImage } from "./image.js";
import { Rng, substream } from "./prng.js";

const PALETTE: Record<string, [number, number, number]> = {
  red: [214, 40, 40],
  green: [44, 186, 58],
  blue: [38, 70, 220],
  yellow: [235, 210, 30],
  magenta: [205, 45, 200],
  cyan: [40, 200, 205],
};

function noisyColorImage(rng: Rng, size: number, rgb: [number, number, number], noise: number): RgbImage {
  const data = new Uint8Array(size * size * 3);
  for (let i = 0; i < size * size; i++) {
    for (let c = 0; c < 3; c++) {
      const v = rgb[c] + noise * 255 * rng.gauss();
      data[i * 3 + c] = Math.max(0, Math.min(255, Math.round(v)));
    }
  }
  return { width: size, height: size, data };
}

export interface DemoConfig {
  outDir: string;
  classes: string[];
  perClass: number;
  size: number;
  noise: number;
  seed: number;
  format: "ppm" | "png";
}

export function makeDemoCorpus(config: DemoConfig): string {
  for (const cls of config.classes) {
    if (!(cls in PALETTE)) {
      throw new Error(`unknown demo class '${cls}' (have: ${Object.keys(PALETTE).join(", ")})`);
    }
  }
  mkdirSync(config.outDir, { recursive: true });
  const lines: string[] = [];
  for (const cls of config.classes) {
    for (let i = 0; i < config.perClass; i++) {
      const rng = substream(config.seed, `demo:${cls}:${i}`);
      const img = noisyColorImage(rng, config.size, PALETTE[cls], config.noise);
      const file = `${cls}_${String(i).padStart(2, "0")}.${config.format}`;
      saveImage(join(config.outDir, file), img);
      lines.push(`${file}\t${cls}`);
    }
  }
  const manifestPath = join(config.outDir, "manifest.tsv");
  writeFileSync(manifestPath, lines.join("\n") + "\n");
  return manifestPath;
}
