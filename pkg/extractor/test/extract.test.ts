import { spawnSync } from "node:child_process";
import { createServer } from "node:http";
import { mkdtempSync, readFileSync, readdirSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { AddressInfo } from "node:net";
import { afterAll, describe, expect, it } from "vitest";

import { HttpEncoder, ToyColorEncoder } from "../src/encoder.js";
import { makeDemoCorpus } from "../src/demo.js";
import { defaultConfig, encodeClassSets, extractManifest } from "../src/extract.js";
import { loadImage } from "../src/image.js";
import { BASIC_TEMPLATE, ENSEMBLE_TEMPLATES } from "../src/prompts.js";

const tmp = mkdtempSync(join(tmpdir(), "extract-test-"));
afterAll(() => rmSync(tmp, { recursive: true, force: true }));

function demoManifest(name: string, perClass: number, size = 48, classes = ["red", "green", "blue"]) {
  return makeDemoCorpus({
    outDir: join(tmp, name),
    classes,
    perClass,
    size,
    noise: 0.06,
    seed: 11,
    format: "ppm",
  });
}

function readF32Rows(path: string, rows: number, dim: number): number[][] {
  const buf = readFileSync(path);
  expect(buf.length).toBe(rows * dim * 4);
  const out: number[][] = [];
  for (let r = 0; r < rows; r++) {
    const row: number[] = [];
    for (let j = 0; j < dim; j++) row.push(buf.readFloatLE((r * dim + j) * 4));
    out.push(row);
  }
  return out;
}

function norm(row: number[]): number {
  return Math.sqrt(row.reduce((acc, v) => acc + v * v, 0));
}

function runPrimary(args: string[]) {
  const res = spawnSync("mta", args, { encoding: "utf8" });
  if (res.error) throw new Error(`could not run the mta CLI: ${res.error.message}`);
  return res;
}

describe("extraction", () => {
  it("writes one bundle per manifest row with the declared shape", async () => {
    const manifest = demoManifest("shape", 2, 32);
    const outDir = join(tmp, "shape-bundles");
    const config = defaultConfig(new ToyColorEncoder(16), outDir, {
      nViews: 8,
      seed: 3,
      templates: [BASIC_TEMPLATE],
    });
    const samples = await extractManifest(config, manifest);
    expect(samples).toHaveLength(6);
    for (const sample of samples) {
      const header = JSON.parse(readFileSync(join(sample.dir, "header.json"), "utf8"));
      expect(header.n_views).toBe(8);
      expect(header.dim).toBe(16);
      expect(header.n_classes).toBe(3);
      expect(header.class_sets).toBe(1);
      expect(header.original_index).toBe(0);
      const rows = readF32Rows(join(sample.dir, "views.f32"), 8, 16);
      for (const row of rows) expect(norm(row)).toBeCloseTo(1.0, 5);
    }
  });

  it("view 0 is the original image's embedding", async () => {
    const manifest = demoManifest("orig", 1, 32);
    const outDir = join(tmp, "orig-bundles");
    const encoder = new ToyColorEncoder(16);
    const config = defaultConfig(encoder, outDir, { nViews: 4, seed: 5, templates: [BASIC_TEMPLATE] });
    const [sample] = await extractManifest(config, manifest);
    const header = JSON.parse(readFileSync(join(sample.dir, "header.json"), "utf8"));
    const imagePath = join(tmp, "orig", header.meta.source_image);
    const expected = await encoder.encodeImage(loadImage(imagePath));
    const rows = readF32Rows(join(sample.dir, "views.f32"), 4, 16);
    rows[0].forEach((v, i) => expect(v).toBeCloseTo(expected[i], 5));
  });

  it("n_views=1 keeps only the original", async () => {
    const manifest = demoManifest("single", 1, 24);
    const config = defaultConfig(new ToyColorEncoder(16), join(tmp, "single-bundles"), {
      nViews: 1,
      templates: [BASIC_TEMPLATE],
    });
    const [sample] = await extractManifest(config, manifest);
    const header = JSON.parse(readFileSync(join(sample.dir, "header.json"), "utf8"));
    expect(header.n_views).toBe(1);
  });

  it("emits identical bundle bytes for identical seeds", async () => {
    const manifest = demoManifest("determinism", 1, 24);
    for (const run of ["d1", "d2"]) {
      const config = defaultConfig(new ToyColorEncoder(16), join(tmp, run), {
        nViews: 6,
        seed: 42,
        templates: [BASIC_TEMPLATE],
      });
      await extractManifest(config, manifest);
    }
    const sample = readdirSync(join(tmp, "d1"))[0];
    for (const file of readdirSync(join(tmp, "d1", sample))) {
      expect(
        readFileSync(join(tmp, "d1", sample, file)).equals(
          readFileSync(join(tmp, "d2", sample, file)),
        ),
      ).toBe(true);
    }
  });

  it("rejects empty template lists", () => {
    expect(() => defaultConfig(new ToyColorEncoder(8), tmp, { templates: [] })).toThrow(/template/);
  });
});

describe("http encoder", () => {
  it("round-trips through an embedding service", async () => {
    const dim = 8;
    const server = createServer((req, res) => {
      let body = "";
      req.on("data", (chunk) => (body += chunk));
      req.on("end", () => {
        const payload = JSON.parse(body);
        const seedText: string = payload.kind === "text" ? payload.text : payload.rgb_base64;
        const vec = Array.from({ length: dim }, (_, i) =>
          Math.sin(i + 1 + seedText.length),
        );
        res.setHeader("content-type", "application/json");
        res.end(JSON.stringify({ embedding: vec }));
      });
    });
    await new Promise<void>((resolve) => server.listen(0, resolve));
    const port = (server.address() as AddressInfo).port;
    try {
      const enc = new HttpEncoder({ endpoint: `http://127.0.0.1:${port}/embed`, dim });
      const text = await enc.encodeText("a photo of a red.");
      expect(text).toHaveLength(dim);
      expect(norm([...text])).toBeCloseTo(1.0, 9);
      const img = await enc.encodeImage({ width: 2, height: 2, data: new Uint8Array(12) });
      expect(img).toHaveLength(dim);
    } finally {
      server.close();
    }
  });
});

describe("contract with the primary CLI (B1)", () => {
  it("ensemble bundles carry exactly 80 class sets and validate", async () => {
    const manifest = demoManifest("b1", 1, 32);
    const outDir = join(tmp, "b1-bundles");
    const config = defaultConfig(new ToyColorEncoder(16), outDir, {
      nViews: 8,
      seed: 7,
      templates: [...ENSEMBLE_TEMPLATES],
    });
    const samples = await extractManifest(config, manifest);
    const header = JSON.parse(readFileSync(join(samples[0].dir, "header.json"), "utf8"));
    expect(header.class_sets).toBe(80);
    const files = readdirSync(samples[0].dir).filter((f) => f.startsWith("classes_"));
    expect(files).toHaveLength(80);

    // the primary's reader is the validation authority
    const res = runPrimary(["run", "--method", "zeroshot", samples[0].dir]);
    expect(res.status).toBe(0);
    const record = JSON.parse(res.stdout.trim());
    expect(record.schema_version).toBe(1);

    const ens = runPrimary(["run", "--method", "mean", "--ensemble", samples[0].dir]);
    expect(ens.status).toBe(0);
    expect(JSON.parse(ens.stdout.trim()).votes).toHaveLength(80);
  });

  it("corrupted bundles are rejected with the format exit code", async () => {
    const manifest = demoManifest("b1bad", 1, 24);
    const outDir = join(tmp, "b1bad-bundles");
    const config = defaultConfig(new ToyColorEncoder(8), outDir, {
      nViews: 2,
      templates: [BASIC_TEMPLATE],
    });
    const [sample] = await extractManifest(config, manifest);
    const viewsPath = join(sample.dir, "views.f32");
    const raw = readFileSync(viewsPath);
    const { writeFileSync } = await import("node:fs");
    writeFileSync(viewsPath, raw.subarray(0, raw.length - 4));
    const res = runPrimary(["run", "--method", "zeroshot", sample.dir]);
    expect(res.status).toBe(3);
  });
});

describe("end-to-end smoke (B2)", () => {
  it("mta accuracy stays within 10 points of zero-shot on 24 local images", async () => {
    const manifest = demoManifest("b2", 8, 48); // 3 classes x 8 images
    const outDir = join(tmp, "b2-bundles");
    const config = defaultConfig(new ToyColorEncoder(32), outDir, {
      nViews: 32,
      seed: 1,
      templates: [BASIC_TEMPLATE],
    });
    const samples = await extractManifest(config, manifest);
    expect(samples.length).toBeGreaterThanOrEqual(20);

    const accuracy = (method: string): number => {
      const res = runPrimary(["run", "--method", method, ...samples.map((s) => s.dir)]);
      expect(res.status).toBe(0);
      const records = res.stdout.trim().split("\n").map((line) => JSON.parse(line));
      let correct = 0;
      records.forEach((rec, i) => {
        if (rec.predicted_name === samples[i].label) correct += 1;
      });
      return correct / records.length;
    };

    const mta = accuracy("mta");
    const zeroshot = accuracy("zeroshot");
    expect(mta).toBeGreaterThanOrEqual(zeroshot - 0.10);
    expect(mta).toBeGreaterThan(0.5); // the toy pipeline is genuinely informative
  }, 120_000);
});
