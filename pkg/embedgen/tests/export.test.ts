import assert from "node:assert/strict";
import { execFileSync, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import test from "node:test";

import { createHashEncoder, fnv1a64, Encoder } from "../src/encoders.js";
import { runExport } from "../src/export.js";
import { renderVectorsFile, VectorsError } from "../src/vectorsFile.js";

function workdir(): string {
  return mkdtempSync(join(tmpdir(), "embedgen-"));
}

function writeFixture(dir: string, ids: string[] = ["r1", "r2", "r3"]): string {
  const texts: Record<string, string> = {
    r1: "iedereen telt mee vind ik",
    r2: "de euro maakt reizen makkelijk",
    r3: "vertrouwen moet je verdienen",
  };
  const path = join(dir, "responses.jsonl");
  const lines = ids.map((id) =>
    JSON.stringify({
      id,
      question_id: "Q13",
      modality: "speech",
      transcript_source: "manual",
      text: texts[id] ?? `tekst voor ${id}`,
    }),
  );
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
  return path;
}

function parseVectors(path: string): { dim: number; rows: Array<[string, number[]]> } {
  const lines = readFileSync(path, "utf-8").trimEnd().split("\n");
  const header = lines[0].split(" ");
  assert.equal(header[0], "DIM");
  const dim = Number(header[1]);
  const rows = lines.slice(1).map((line) => {
    const [id, values] = line.split("\t");
    return [id, values.split(" ").map(Number)] as [string, number[]];
  });
  return { dim, rows };
}

test("hash export writes a valid vectors file in input order", async () => {
  const dir = workdir();
  const input = writeFixture(dir);
  const output = join(dir, "vectors.txt");
  const result = await runExport(
    { inputPath: input, outputPath: output, batchSize: 2, dim: 64 },
    createHashEncoder(64),
  );
  assert.equal(result.count, 3);
  assert.equal(result.dim, 64);

  const { dim, rows } = parseVectors(output);
  assert.equal(dim, 64);
  assert.deepEqual(rows.map(([id]) => id), ["r1", "r2", "r3"]);
  for (const [id, values] of rows) {
    assert.equal(values.length, 64, id);
    const norm = Math.sqrt(values.reduce((acc, v) => acc + v * v, 0));
    assert.ok(Math.abs(norm - 1) <= 1e-5, `row ${id} norm ${norm}`);
  }
});

test("export is byte-identical across runs", async () => {
  const dir = workdir();
  const input = writeFixture(dir);
  const out1 = join(dir, "v1.txt");
  const out2 = join(dir, "v2.txt");
  await runExport({ inputPath: input, outputPath: out1, batchSize: 64 }, createHashEncoder(32));
  await runExport({ inputPath: input, outputPath: out2, batchSize: 64 }, createHashEncoder(32));
  assert.deepEqual(readFileSync(out1), readFileSync(out2));
});

test("batching preserves input order and batch size", async () => {
  const dir = workdir();
  const ids = Array.from({ length: 7 }, (_, i) => `r${i}`);
  const input = writeFixture(dir, ids);
  const output = join(dir, "v.txt");
  const calls: number[] = [];
  const recorded: string[] = [];
  const stub: Encoder = {
    dim: 8,
    async encode(texts) {
      calls.push(texts.length);
      recorded.push(...texts);
      return texts.map((_, k) => {
        const row = new Array(8).fill(0);
        row[k % 8] = 1;
        return row;
      });
    },
  };
  await runExport({ inputPath: input, outputPath: output, batchSize: 3 }, stub);
  assert.deepEqual(calls, [3, 3, 1]);
  assert.equal(recorded.length, 7);
  const { rows } = parseVectors(output);
  assert.deepEqual(rows.map(([id]) => id), ids);
});

test("id collision is rejected", async () => {
  const dir = workdir();
  const path = join(dir, "responses.jsonl");
  const record = {
    id: "dup", question_id: "Q13", modality: "speech",
    transcript_source: "manual", text: "tekst",
  };
  writeFileSync(path, JSON.stringify(record) + "\n" + JSON.stringify(record) + "\n");
  await assert.rejects(
    runExport({ inputPath: path, outputPath: join(dir, "v.txt"), batchSize: 4 },
              createHashEncoder(16)),
    /id collision/,
  );
});

test("dimension mismatch against the configured dim is rejected", async () => {
  const dir = workdir();
  const input = writeFixture(dir);
  const stub: Encoder = {
    async encode(texts) {
      return texts.map(() => [1, 0, 0]);
    },
  };
  await assert.rejects(
    runExport({ inputPath: input, outputPath: join(dir, "v.txt"), batchSize: 4, dim: 8 }, stub),
    /dimension mismatch/,
  );
});

test("rows that cannot be normalized are rejected", () => {
  assert.throws(() => renderVectorsFile(2, [["a", [0, 0]]]), VectorsError);
  assert.throws(() => renderVectorsFile(2, [["a", [Number.NaN, 1]]]), VectorsError);
});

test("fnv1a64 matches the published test vectors", () => {
  const encoder = new TextEncoder();
  assert.equal(fnv1a64(encoder.encode("")), 0xcbf29ce484222325n);
  assert.equal(fnv1a64(encoder.encode("a")), 0xaf63dc4c8601ec8cn);
  assert.equal(fnv1a64(encoder.encode("foobar")), 0x85944171f73967e8n);
});

test("output loads through the primary parser with zero warnings", async (t) => {
  const probe = spawnSync("python3", ["-c", "import surveytext"], { encoding: "utf-8" });
  if (probe.status !== 0) {
    t.skip("primary package not importable here");
    return;
  }
  const dir = workdir();
  const input = writeFixture(dir);
  const output = join(dir, "vectors.txt");
  await runExport(
    { inputPath: input, outputPath: output, batchSize: 64, dim: 64 },
    createHashEncoder(64),
  );
  // -W error turns any warning into a failure; the declared DIM must match
  const check = execFileSync(
    "python3",
    [
      "-W", "error", "-c",
      [
        "import sys",
        "from surveytext.embeddings import load_vectors",
        "matrix = load_vectors(sys.argv[1])",
        "assert matrix.dim == 64, matrix.dim",
        "assert matrix.ids == ('r1', 'r2', 'r3'), matrix.ids",
        "print('ok')",
      ].join("\n"),
      output,
    ],
    { encoding: "utf-8" },
  );
  assert.equal(check.trim(), "ok");
});
