/**
 * Reader for the responses JSONL format: one object per line with
 * id, question_id, modality, transcript_source and text.
 */

import { readFileSync } from "node:fs";

export interface ResponseRecord {
  id: string;
  question_id: string;
  modality: string;
  transcript_source: string;
  text: string;
}

export class ResponsesError extends Error {}

const REQUIRED = ["id", "question_id", "modality", "transcript_source", "text"] as const;

export function readResponsesJsonl(path: string): ResponseRecord[] {
  const content = readFileSync(path, "utf-8");
  const records: ResponseRecord[] = [];
  const lines = content.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new ResponsesError(`line ${i + 1}: invalid JSON (${(err as Error).message})`);
    }
    if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
      throw new ResponsesError(`line ${i + 1}: expected a JSON object`);
    }
    const record = parsed as Record<string, unknown>;
    for (const key of REQUIRED) {
      if (record[key] === undefined || record[key] === null) {
        throw new ResponsesError(`line ${i + 1}: missing field '${key}'`);
      }
    }
    records.push({
      id: String(record.id),
      question_id: String(record.question_id),
      modality: String(record.modality),
      transcript_source: String(record.transcript_source),
      text: String(record.text),
    });
  }
  return records;
}
