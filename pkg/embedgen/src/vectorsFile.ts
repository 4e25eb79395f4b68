/**
 * Writer for the plain-text vectors file format:
 *
 *   DIM <d>
 *   <id>\t<v1> <v2> ... <vd>
 *
 * Floats are serialized with JavaScript's shortest round-trip
 * representation and every row is L2-normalized before writing.
 */

import { writeFileSync } from "node:fs";

export class VectorsError extends Error {}

export function l2Normalize(row: number[], id: string): number[] {
  let sumSquares = 0;
  for (const v of row) {
    if (!Number.isFinite(v)) {
      throw new VectorsError(`non-finite vector value for id '${id}'`);
    }
    sumSquares += v * v;
  }
  const norm = Math.sqrt(sumSquares);
  if (norm === 0) {
    throw new VectorsError(`zero vector for id '${id}' cannot be normalized`);
  }
  if (Math.abs(norm - 1) <= 1e-12) {
    return row;
  }
  return row.map((v) => v / norm);
}

export function renderVectorsFile(dim: number, rows: Array<[string, number[]]>): string {
  const seen = new Set<string>();
  const lines = [`DIM ${dim}`];
  for (const [id, row] of rows) {
    if (seen.has(id)) {
      throw new VectorsError(`id collision: '${id}' appears more than once`);
    }
    seen.add(id);
    if (row.length !== dim) {
      throw new VectorsError(
        `id '${id}' has ${row.length} values, expected dim ${dim}`,
      );
    }
    const normalized = l2Normalize(row, id);
    lines.push(`${id}\t${normalized.map((v) => String(v)).join(" ")}`);
  }
  return lines.join("\n") + "\n";
}

export function writeVectorsFile(
  path: string,
  dim: number,
  rows: Array<[string, number[]]>,
): void {
  writeFileSync(path, renderVectorsFile(dim, rows), "utf-8");
}
