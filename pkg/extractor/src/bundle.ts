/**
 * Writer for the sample-bundle interchange format consumed by the mta CLI:
 * a directory with header.json plus little-endian float32 matrices
 * (views.f32, classes_00.f32, ...), row-major, sizes matching the header.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

export const BUNDLE_FORMAT = "mta-bundle";
export const BUNDLE_VERSION = 1;

export interface BundleData {
  /** nViews rows of dim floats; row originalIndex is the raw image's view. */
  views: Float64Array[];
  /** classSets[s][k] is the embedding of class k under prompt set s. */
  classSets: Float64Array[][];
  classNames: string[];
  temperature: number;
  originalIndex?: number;
  meta?: Record<string, unknown>;
}

function toF32Bytes(rows: Float64Array[]): Buffer {
  const dim = rows[0].length;
  const buf = Buffer.alloc(rows.length * dim * 4);
  rows.forEach((row, r) => {
    if (row.length !== dim) throw new Error("ragged matrix rows");
    for (let j = 0; j < dim; j++) buf.writeFloatLE(row[j], (r * dim + j) * 4);
  });
  return buf;
}

export function classFileName(index: number): string {
  return `classes_${String(index).padStart(2, "0")}.f32`;
}

export function writeBundle(dir: string, data: BundleData): string {
  const nViews = data.views.length;
  if (nViews < 1) throw new Error("bundle needs at least one view");
  const dim = data.views[0].length;
  const nClasses = data.classNames.length;
  if (nClasses < 2) throw new Error("bundle needs at least two classes");
  if (data.classSets.length < 1) throw new Error("bundle needs at least one class set");
  for (const set of data.classSets) {
    if (set.length !== nClasses) throw new Error("class set size mismatch");
  }

  mkdirSync(dir, { recursive: true });
  const header = {
    class_names: data.classNames,
    class_sets: data.classSets.length,
    dim,
    format: BUNDLE_FORMAT,
    meta: data.meta ?? {},
    n_classes: nClasses,
    n_views: nViews,
    original_index: data.originalIndex ?? 0,
    temperature: data.temperature,
    version: BUNDLE_VERSION,
  };
  writeFileSync(join(dir, "header.json"), JSON.stringify(header, null, 2) + "\n");
  writeFileSync(join(dir, "views.f32"), toF32Bytes(data.views));
  data.classSets.forEach((set, s) => {
    writeFileSync(join(dir, classFileName(s)), toF32Bytes(set));
  });
  return dir;
}
