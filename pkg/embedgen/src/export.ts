/**
 * Batch export: responses file in, vectors file out.
 *
 * Inference runs in batches but the output file lists one line per
 * input id, strictly in input order, normalized, with the header DIM
 * matching every row.
 */

import { Encoder } from "./encoders.js";
import { readResponsesJsonl } from "./responses.js";
import { writeVectorsFile, VectorsError } from "./vectorsFile.js";

export interface EmbedJob {
  inputPath: string;
  outputPath: string;
  batchSize: number;
  /** expected output dimension; checked against what the encoder emits */
  dim?: number;
}

export interface ExportResult {
  count: number;
  dim: number;
}

export async function runExport(job: EmbedJob, encoder: Encoder): Promise<ExportResult> {
  if (job.batchSize < 1) {
    throw new VectorsError(`batch size must be at least 1, got ${job.batchSize}`);
  }
  const records = readResponsesJsonl(job.inputPath);
  if (records.length === 0) {
    throw new VectorsError(`no responses in ${job.inputPath}`);
  }
  const seen = new Set<string>();
  for (const record of records) {
    if (seen.has(record.id)) {
      throw new VectorsError(`id collision: '${record.id}' appears more than once`);
    }
    seen.add(record.id);
  }

  const rows: Array<[string, number[]]> = [];
  let dim = job.dim ?? encoder.dim;
  for (let start = 0; start < records.length; start += job.batchSize) {
    const batch = records.slice(start, start + job.batchSize);
    const vectors = await encoder.encode(batch.map((r) => r.text));
    if (vectors.length !== batch.length) {
      throw new VectorsError(
        `encoder returned ${vectors.length} vectors for a batch of ${batch.length}`,
      );
    }
    for (let k = 0; k < batch.length; k++) {
      const vector = vectors[k];
      if (dim === undefined) {
        dim = vector.length;
      }
      if (vector.length !== dim) {
        throw new VectorsError(
          `dimension mismatch for id '${batch[k].id}': got ${vector.length}, expected ${dim}`,
        );
      }
      rows.push([batch[k].id, vector]);
    }
  }
  writeVectorsFile(job.outputPath, dim!, rows);
  return { count: rows.length, dim: dim! };
}
