/**
 * Manifest parsing: one image per line, "path<TAB>label" (or comma
 * separated). Relative paths resolve against the manifest's directory.
 */

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, join } from "node:path";

export interface ManifestEntry {
  path: string;
  label: string;
}

export function parseManifest(text: string, baseDir = "."): ManifestEntry[] {
  const entries: ManifestEntry[] = [];
  for (const [lineNo, raw] of text.split("\n").entries()) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const sep = line.includes("\t") ? "\t" : ",";
    const parts = line.split(sep).map((p) => p.trim());
    if (parts.length !== 2 || !parts[0] || !parts[1]) {
      throw new Error(`manifest line ${lineNo + 1}: expected "path${sep}label"`);
    }
    const path = isAbsolute(parts[0]) ? parts[0] : join(baseDir, parts[0]);
    entries.push({ path, label: parts[1] });
  }
  if (entries.length === 0) throw new Error("manifest has no entries");
  return entries;
}

export function loadManifest(path: string): ManifestEntry[] {
  return parseManifest(readFileSync(path, "utf8"), dirname(path));
}

export function classNamesOf(entries: ManifestEntry[]): string[] {
  return [...new Set(entries.map((e) => e.label))].sort();
}
