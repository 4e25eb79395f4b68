/**
 * Sentence encoders behind a single batch interface.
 *
 * The transformer encoder loads a feature-extraction pipeline (mean
 * pooling, normalized) from a local or downloadable model; the hash
 * encoder is a dependency-free deterministic fallback that buckets
 * signed character n-gram hashes, for offline runs and tests. The two
 * produce different spaces; only the file format is shared.
 */

export interface Encoder {
  /** Known output dimension, when the encoder can promise one up front. */
  dim?: number;
  encode(texts: string[]): Promise<number[][]>;
}

export class ModelError extends Error {}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;

export function fnv1a64(data: Uint8Array): bigint {
  let hash = FNV_OFFSET;
  for (const byte of data) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & MASK64;
  }
  return hash;
}

export function createHashEncoder(dim: number): Encoder {
  if (dim < 8) {
    throw new ModelError(`hash encoder dimension must be at least 8, got ${dim}`);
  }
  const textEncoder = new TextEncoder();
  return {
    dim,
    async encode(texts: string[]): Promise<number[][]> {
      return texts.map((raw) => {
        const text = raw.toLowerCase().split(/\s+/).filter(Boolean).join(" ");
        const acc = new Array<number>(dim).fill(0);
        for (const n of [3, 4, 5]) {
          for (let start = 0; start + n <= text.length; start++) {
            const hash = fnv1a64(textEncoder.encode(text.slice(start, start + n)));
            const bucket = Number(hash % BigInt(dim));
            acc[bucket] += hash >> 63n ? -1 : 1;
          }
        }
        return acc;
      });
    },
  };
}

const TRANSFORMERS_MODULE = "@xenova/transformers";

export async function createTransformerEncoder(
  model: string,
  device?: string,
): Promise<Encoder> {
  let transformers: any;
  try {
    transformers = await import(TRANSFORMERS_MODULE);
  } catch (err) {
    throw new ModelError(
      `encoder backend unavailable (install ${TRANSFORMERS_MODULE}): ${(err as Error).message}`,
    );
  }
  let extractor: any;
  try {
    extractor = await transformers.pipeline(
      "feature-extraction", model, device ? { device } : undefined,
    );
  } catch (err) {
    throw new ModelError(`failed to load model '${model}': ${(err as Error).message}`);
  }
  return {
    async encode(texts: string[]): Promise<number[][]> {
      const output = (await extractor(texts, {
        pooling: "mean",
        normalize: true,
      })) as { dims: number[]; data: Float32Array };
      const [count, width] = output.dims;
      if (count !== texts.length) {
        throw new ModelError(`model returned ${count} rows for ${texts.length} inputs`);
      }
      const rows: number[][] = [];
      for (let i = 0; i < count; i++) {
        rows.push(Array.from(output.data.subarray(i * width, (i + 1) * width)));
      }
      return rows;
    },
  };
}
