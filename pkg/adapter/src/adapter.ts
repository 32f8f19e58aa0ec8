/**
 * Embedding export: run a dual encoder over manifest captions or video ids
 * and write the rows as a CEVB file the Python harness loads directly.
 *
 * Encoders are opaque: any module that exports `encodeText(texts)` and/or
 * `encodeVideo(videoIds)` (sync or async, returning one number[] per input)
 * can be named by path; "mock" selects the built-in bag-of-words encoder.
 * Files are written atomically (temp + rename), so a failing encoder never
 * leaves a partial file behind.
 */

import { renameSync, unlinkSync, writeFileSync } from "node:fs";
import { resolve } from "node:path";

import { encodeCevb } from "./cevb";
import { ManifestRecord, readManifest } from "./manifest";
import { MOCK_DIM, mockEncode } from "./mock";

export interface AdapterSpec {
  /** Encoder entry point: "mock" or a module path. */
  model: string;
  batchSize: number;
  device: string;
  output: string;
}

export interface Encoder {
  encodeText?(texts: string[], device: string): number[][] | Promise<number[][]>;
  encodeVideo?(videoIds: string[], device: string): number[][] | Promise<number[][]>;
}

export class AdapterError extends Error {}

const mockEncoder: Encoder = {
  encodeText: (texts) => texts.map((text) => Array.from(mockEncode(text))),
  encodeVideo: (videoIds) => videoIds.map((id) => Array.from(mockEncode(id))),
};

export function loadEncoder(model: string): Encoder {
  if (model === "mock") {
    return mockEncoder;
  }
  // eslint-disable-next-line @typescript-eslint/no-var-requires
  const loaded = require(resolve(model)) as Encoder;
  if (typeof loaded.encodeText !== "function" && typeof loaded.encodeVideo !== "function") {
    throw new AdapterError(
      `encoder module ${model} exports neither encodeText nor encodeVideo`,
    );
  }
  return loaded;
}

async function encodeAll(
  ids: string[],
  inputs: string[],
  encode: (batch: string[]) => number[][] | Promise<number[][]>,
  batchSize: number,
): Promise<Float32Array[]> {
  const rows: Float32Array[] = [];
  let dim = -1;
  for (let start = 0; start < inputs.length; start += batchSize) {
    const batchIds = ids.slice(start, start + batchSize);
    let batchRows: number[][];
    try {
      batchRows = await encode(inputs.slice(start, start + batchSize));
    } catch (err) {
      throw new AdapterError(
        `encoder failed on record ${batchIds[0]}: ${(err as Error).message}`,
      );
    }
    if (batchRows.length !== batchIds.length) {
      throw new AdapterError(
        `encoder returned ${batchRows.length} rows for ${batchIds.length} inputs at record ${batchIds[0]}`,
      );
    }
    batchRows.forEach((values, i) => {
      if (dim === -1) {
        dim = values.length;
      } else if (values.length !== dim) {
        throw new AdapterError(
          `dim mismatch at record ${batchIds[i]}: got ${values.length}, expected ${dim}`,
        );
      }
      rows.push(Float32Array.from(values));
    });
  }
  return rows;
}

function writeAtomically(path: string, data: Buffer): void {
  const temp = `${path}.tmp-${process.pid}`;
  writeFileSync(temp, data);
  try {
    renameSync(temp, path);
  } catch (err) {
    unlinkSync(temp);
    throw err;
  }
}

export async function exportTextEmbeddings(
  spec: AdapterSpec,
  manifestPath: string,
): Promise<number> {
  const records = readManifest(manifestPath);
  if (records.length === 0) {
    throw new AdapterError(`no inputs: empty manifest ${manifestPath}`);
  }
  const failed = records.find((record: ManifestRecord) => record.error !== undefined);
  if (failed) {
    throw new AdapterError(
      `manifest record ${failed.caption_id} carries an error, nothing to encode`,
    );
  }
  const ids = records.map((record) => record.caption_id);
  if (new Set(ids).size !== ids.length) {
    throw new AdapterError("duplicate caption ids in manifest");
  }
  const encoder = loadEncoder(spec.model);
  if (typeof encoder.encodeText !== "function") {
    throw new AdapterError(`encoder ${spec.model} does not support encodeText`);
  }
  const texts = records.map((record) => record.text ?? "");
  const rows = await encodeAll(
    ids,
    texts,
    (batch) => encoder.encodeText!(batch, spec.device),
    spec.batchSize,
  );
  writeAtomically(spec.output, encodeCevb({ ids, dim: rows[0].length, rows }));
  return ids.length;
}

export async function exportVideoEmbeddings(
  spec: AdapterSpec,
  videoIds: string[],
): Promise<number> {
  if (videoIds.length === 0) {
    throw new AdapterError("no inputs: empty video id list");
  }
  if (new Set(videoIds).size !== videoIds.length) {
    throw new AdapterError("duplicate video ids");
  }
  const encoder = loadEncoder(spec.model);
  if (typeof encoder.encodeVideo !== "function") {
    throw new AdapterError(`encoder ${spec.model} does not support encodeVideo`);
  }
  const rows = await encodeAll(
    videoIds,
    videoIds,
    (batch) => encoder.encodeVideo!(batch, spec.device),
    spec.batchSize,
  );
  writeAtomically(spec.output, encodeCevb({ ids: videoIds, dim: rows[0].length, rows }));
  return videoIds.length;
}

export { MOCK_DIM, mockEncode };
