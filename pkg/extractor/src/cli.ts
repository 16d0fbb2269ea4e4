#!/usr/bin/env node
/**
 * Extractor CLI.
 *
 *   extract   --manifest m.tsv --out bundles/ [--views 64] [--ensemble]
 *             [--seed 0] [--encoder toy|http] [--endpoint URL] [--dim 32]
 *   make-demo --out images/ [--classes red,green,blue] [--per-class 8]
 *             [--size 64] [--noise 0.06] [--seed 1] [--format ppm|png]
 *
 * Bundles written by `extract` feed straight into `mta run`.
 */

import { parseArgs } from "node:util";

import { makeDemoCorpus } from "./demo.js";
import { makeEncoder } from "./encoder.js";
import { defaultConfig, extractManifest } from "./extract.js";
import { BASIC_TEMPLATE, ENSEMBLE_TEMPLATES } from "./prompts.js";

function fail(message: string): never {
  console.error(`error: ${message}`);
  process.exit(2);
}

async function cmdExtract(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: "string" },
      out: { type: "string" },
      views: { type: "string", default: "64" },
      ensemble: { type: "boolean", default: false },
      seed: { type: "string", default: "0" },
      encoder: { type: "string", default: "toy" },
      endpoint: { type: "string" },
      dim: { type: "string" },
    },
  });
  if (!values.manifest || !values.out) fail("extract needs --manifest and --out");
  const encoder = makeEncoder(values.encoder!, {
    dim: values.dim ? parseInt(values.dim, 10) : undefined,
    endpoint: values.endpoint,
  });
  const config = defaultConfig(encoder, values.out!, {
    nViews: parseInt(values.views!, 10),
    seed: parseInt(values.seed!, 10),
    templates: values.ensemble ? [...ENSEMBLE_TEMPLATES] : [BASIC_TEMPLATE],
  });
  const samples = await extractManifest(config, values.manifest!);
  for (const sample of samples) {
    console.log(JSON.stringify({ bundle: sample.dir, label: sample.label }));
  }
  console.error(`wrote ${samples.length} bundles to ${values.out}`);
  return 0;
}

function cmdMakeDemo(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      classes: { type: "string", default: "red,green,blue" },
      "per-class": { type: "string", default: "8" },
      size: { type: "string", default: "64" },
      noise: { type: "string", default: "0.06" },
      seed: { type: "string", default: "1" },
      format: { type: "string", default: "ppm" },
    },
  });
  if (!values.out) fail("make-demo needs --out");
  const format = values.format === "png" ? "png" : "ppm";
  const manifest = makeDemoCorpus({
    outDir: values.out!,
    classes: values.classes!.split(",").map((c) => c.trim()),
    perClass: parseInt(values["per-class"]!, 10),
    size: parseInt(values.size!, 10),
    noise: parseFloat(values.noise!),
    seed: parseInt(values.seed!, 10),
    format,
  });
  console.log(manifest);
  return 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "extract") return await cmdExtract(rest);
    if (command === "make-demo") return cmdMakeDemo(rest);
    fail(`usage: extractor <extract|make-demo> [options] (got '${command ?? ""}')`);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main().then((code) => process.exit(code));
