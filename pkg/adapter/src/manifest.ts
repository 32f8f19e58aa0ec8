/** Perturbation manifest reader (JSON Lines from the Python harness). */

import { readFileSync } from "node:fs";

export interface ManifestRecord {
  caption_id: string;
  video_id: string;
  task_id: string;
  text?: string;
  provenance?: unknown[];
  error?: string;
}

export function readManifest(path: string): ManifestRecord[] {
  const records: ManifestRecord[] = [];
  const lines = readFileSync(path, "utf8").split("\n");
  lines.forEach((line, index) => {
    if (!line.trim()) {
      return;
    }
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}: line ${index + 1}: ${(err as Error).message}`);
    }
    const record = parsed as ManifestRecord;
    if (!record.caption_id || !record.task_id) {
      throw new Error(`${path}: line ${index + 1}: not a manifest record`);
    }
    records.push(record);
  });
  return records;
}
