#!/usr/bin/env node
/**
 * embedgen: export sentence vectors for a responses file.
 *
 *   embedgen --in responses.jsonl --out vectors.txt [--model <name>]
 *            [--batch 64] [--encoder transformer|hash] [--dim <d>]
 *            [--device <hint>]
 *
 * The default encoder is a multilingual sentence transformer with
 * 512-dimensional output; --encoder hash selects the offline
 * deterministic fallback.
 */

import { parseArgs } from "node:util";

import { createHashEncoder, createTransformerEncoder, ModelError } from "./encoders.js";
import { ResponsesError } from "./responses.js";
import { runExport } from "./export.js";
import { VectorsError } from "./vectorsFile.js";

export const DEFAULT_MODEL = "Xenova/distiluse-base-multilingual-cased-v2";
export const DEFAULT_DIM = 512;

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        model: { type: "string", default: DEFAULT_MODEL },
        batch: { type: "string", default: "64" },
        encoder: { type: "string", default: "transformer" },
        dim: { type: "string" },
        device: { type: "string" },
      },
    }));
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  if (!values.in || !values.out) {
    console.error("usage: embedgen --in responses.jsonl --out vectors.txt");
    return 1;
  }
  const batchSize = Number(values.batch);
  const dim = values.dim === undefined ? undefined : Number(values.dim);
  if (!Number.isInteger(batchSize) || (dim !== undefined && !Number.isInteger(dim))) {
    console.error("usage error: --batch and --dim must be integers");
    return 1;
  }
  if (values.encoder !== "transformer" && values.encoder !== "hash") {
    console.error(`usage error: unknown encoder '${values.encoder}'`);
    return 1;
  }

  try {
    const encoder =
      values.encoder === "hash"
        ? createHashEncoder(dim ?? DEFAULT_DIM)
        : await createTransformerEncoder(values.model!, values.device);
    const result = await runExport(
      { inputPath: values.in, outputPath: values.out, batchSize, dim },
      encoder,
    );
    console.error(`wrote ${result.count} vectors of dim ${result.dim} to ${values.out}`);
    return 0;
  } catch (err) {
    if (err instanceof ModelError) {
      console.error(`model error: ${err.message}`);
      return 3;
    }
    if (err instanceof ResponsesError || err instanceof VectorsError) {
      console.error(`data error: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`data error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
