/**
 * Bundle extraction: for each manifest image, embed the original plus
 * (nViews - 1) seeded random crops, embed every class under every prompt
 * template, and write one interchange bundle per image.
 */

import { basename, join } from "node:path";

import { writeBundle } from "./bundle.js";
import { Encoder } from "./encoder.js";
import { CropParams, DEFAULT_CROP, RgbImage, loadImage, randomResizedCrop } from "./image.js";
import { ManifestEntry, classNamesOf, loadManifest } from "./manifest.js";
import { fillTemplate } from "./prompts.js";
import { substream } from "./prng.js";

export interface ExtractionConfig {
  encoder: Encoder;
  nViews: number;
  templates: string[];
  crop: CropParams;
  seed: number;
  outDir: string;
}

export const DEFAULT_N_VIEWS = 64;

export function defaultConfig(encoder: Encoder, outDir: string, partial: Partial<ExtractionConfig> = {}): ExtractionConfig {
  const config = {
    encoder,
    nViews: DEFAULT_N_VIEWS,
    templates: [] as string[],
    crop: DEFAULT_CROP,
    seed: 0,
    outDir,
    ...partial,
  };
  if (config.nViews < 1) throw new Error("nViews must be >= 1");
  if (config.templates.length === 0) throw new Error("template list must be non-empty");
  return config;
}

export async function encodeClassSets(
  config: ExtractionConfig,
  classNames: string[],
): Promise<Float64Array[][]> {
  const sets: Float64Array[][] = [];
  for (const template of config.templates) {
    const set: Float64Array[] = [];
    for (const name of classNames) {
      set.push(await config.encoder.encodeText(fillTemplate(template, name), name));
    }
    sets.push(set);
  }
  return sets;
}

export async function encodeViews(
  config: ExtractionConfig,
  image: RgbImage,
  sampleName: string,
): Promise<Float64Array[]> {
  const views: Float64Array[] = [await config.encoder.encodeImage(image)];
  const rng = substream(config.seed, `crops:${sampleName}`);
  for (let v = 1; v < config.nViews; v++) {
    views.push(await config.encoder.encodeImage(randomResizedCrop(image, rng, config.crop)));
  }
  return views;
}

export interface ExtractedSample {
  dir: string;
  label: string;
}

export async function extractSample(
  config: ExtractionConfig,
  imagePath: string,
  label: string,
  classNames: string[],
  classSets: Float64Array[][],
  sampleName?: string,
): Promise<ExtractedSample> {
  const name = sampleName ?? basename(imagePath).replace(/\.[^.]+$/, "");
  const image = loadImage(imagePath);
  const views = await encodeViews(config, image, name);
  const dir = join(config.outDir, name);
  writeBundle(dir, {
    views,
    classSets,
    classNames,
    temperature: config.encoder.temperature,
    originalIndex: 0,
    meta: {
      encoder: config.encoder.name,
      source_image: basename(imagePath),
      label,
      n_templates: config.templates.length,
      crop_scale: config.crop.scale,
      crop_ratio: config.crop.ratio,
      seed: config.seed,
    },
  });
  return { dir, label };
}

export async function extractManifest(
  config: ExtractionConfig,
  manifestPath: string,
): Promise<ExtractedSample[]> {
  const entries: ManifestEntry[] = loadManifest(manifestPath);
  const classNames = classNamesOf(entries);
  if (classNames.length < 2) throw new Error("need at least two distinct labels");
  const classSets = await encodeClassSets(config, classNames);
  const out: ExtractedSample[] = [];
  const seen = new Map<string, number>();
  for (const entry of entries) {
    const base = basename(entry.path).replace(/\.[^.]+$/, "");
    const count = seen.get(base) ?? 0;
    seen.set(base, count + 1);
    const name = count === 0 ? base : `${base}_${count}`;
    out.push(await extractSample(config, entry.path, entry.label, classNames, classSets, name));
  }
  return out;
}
