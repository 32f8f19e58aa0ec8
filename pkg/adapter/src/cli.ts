#!/usr/bin/env node
/**
 * capbench-adapter: export embeddings into CEVB files.
 *
 *   capbench-adapter export-text  --manifest run/original.jsonl --model mock --out texts.cevb
 *   capbench-adapter export-video --video-ids ids.txt --model ./my-encoder.js --out videos.cevb
 *
 * Flag names mirror the Python CLI. Exit codes: 0 success, 1 usage error,
 * 2 data error, 3 I/O error.
 */

import { readFileSync } from "node:fs";
import process from "node:process";

import { AdapterError, AdapterSpec, exportTextEmbeddings, exportVideoEmbeddings } from "./adapter";
import { CevbError } from "./cevb";

interface ParsedArgs {
  command: string;
  flags: Map<string, string>;
}

const FLAGS_WITH_VALUES = new Set([
  "--manifest",
  "--video-ids",
  "--model",
  "--batch-size",
  "--device",
  "--out",
]);

class UsageError extends Error {}

function parseArgs(argv: string[]): ParsedArgs {
  if (argv.length === 0) {
    throw new UsageError("expected a command: export-text or export-video");
  }
  const [command, ...rest] = argv;
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    if (!FLAGS_WITH_VALUES.has(flag)) {
      throw new UsageError(`unknown flag: ${flag}`);
    }
    const value = rest[i + 1];
    if (value === undefined) {
      throw new UsageError(`flag ${flag} needs a value`);
    }
    flags.set(flag, value);
    i++;
  }
  return { command, flags };
}

function specFrom(flags: Map<string, string>): AdapterSpec {
  const out = flags.get("--out");
  if (!out) {
    throw new UsageError("--out is required");
  }
  const batchSize = Number(flags.get("--batch-size") ?? "64");
  if (!Number.isInteger(batchSize) || batchSize <= 0) {
    throw new UsageError("--batch-size must be a positive integer");
  }
  return {
    model: flags.get("--model") ?? "mock",
    batchSize,
    device: flags.get("--device") ?? "cpu",
    output: out,
  };
}

export async function main(argv: string[]): Promise<number> {
  try {
    const { command, flags } = parseArgs(argv);
    const spec = specFrom(flags);
    if (command === "export-text") {
      const manifest = flags.get("--manifest");
      if (!manifest) {
        throw new UsageError("export-text needs --manifest");
      }
      const count = await exportTextEmbeddings(spec, manifest);
      console.log(`wrote ${count} rows to ${spec.output}`);
      return 0;
    }
    if (command === "export-video") {
      const listPath = flags.get("--video-ids");
      if (!listPath) {
        throw new UsageError("export-video needs --video-ids");
      }
      const videoIds = readFileSync(listPath, "utf8")
        .split("\n")
        .map((line) => line.trim())
        .filter((line) => line.length > 0);
      const count = await exportVideoEmbeddings(spec, videoIds);
      console.log(`wrote ${count} rows to ${spec.output}`);
      return 0;
    }
    throw new UsageError(`unknown command: ${command}`);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`capbench-adapter: usage error: ${err.message}`);
      return 1;
    }
    if (err instanceof AdapterError || err instanceof CevbError) {
      console.error(`capbench-adapter: error: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code !== undefined) {
      console.error(`capbench-adapter: i/o error: ${(err as Error).message}`);
      return 3;
    }
    throw err;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
