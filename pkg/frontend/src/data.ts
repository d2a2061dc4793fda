/** Dataset loading for entrank CSV files (plain and augmented). */

import * as fs from "fs";
import * as path from "path";

export interface DatasetRecord {
  id: string;
  tokens: Int32Array; // A,C,G,T -> 0..3, '.' padding -> 4
  label: number;
}

export interface Dataset {
  records: DatasetRecord[];
  seqLen: number;
  numClasses: number;
  source: string;
}

const TOKEN_OF: Record<string, number> = {
  A: 0, C: 1, G: 2, T: 3, a: 0, c: 1, g: 2, t: 3, ".": 4,
};

export function encodeSequence(seq: string): Int32Array {
  const out = new Int32Array(seq.length);
  for (let i = 0; i < seq.length; i++) {
    const tok = TOKEN_OF[seq[i]];
    if (tok === undefined) {
      throw new Error(`invalid character '${seq[i]}' at position ${i}`);
    }
    out[i] = tok;
  }
  return out;
}

/** Minimal CSV splitting; entrank files never quote fields. */
function splitCsvLine(line: string): string[] {
  return line.split(",");
}

export function loadDataset(file: string): Dataset {
  if (!fs.existsSync(file)) {
    throw new Error(`dataset file missing: ${file}`);
  }
  const lines = fs.readFileSync(file, "utf8").split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}: empty file`);
  }
  const header = splitCsvLine(lines[0]);
  const idCol = header.indexOf("id");
  const seqCol = header.indexOf("sequence");
  const labelCol = header.indexOf("label");
  if (seqCol < 0 || labelCol < 0) {
    throw new Error(`${file}: header must contain sequence,label (got: ${header.join(",")})`);
  }
  const records: DatasetRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = splitCsvLine(lines[i]);
    const label = Number(parts[labelCol]);
    if (!Number.isInteger(label) || label < 0) {
      throw new Error(`${file} line ${i + 1}: bad label '${parts[labelCol]}'`);
    }
    records.push({
      id: idCol >= 0 ? parts[idCol] : `row${i}`,
      tokens: encodeSequence(parts[seqCol]),
      label,
    });
  }
  if (records.length === 0) {
    throw new Error(`${file}: no records`);
  }
  const seqLen = records[0].tokens.length;
  for (const r of records) {
    if (r.tokens.length !== seqLen) {
      throw new Error(`${file}: record ${r.id} has length ${r.tokens.length}, expected ${seqLen}`);
    }
  }
  const numClasses = Math.max(...records.map((r) => r.label)) + 1;
  return { records, seqLen, numClasses, source: file };
}

/** The augmentation provenance sidecar written by the entrank CLI. */
export function loadProvenance(datasetFile: string): Record<string, unknown> | null {
  const sidecar = datasetFile + ".provenance.json";
  if (!fs.existsSync(sidecar)) {
    return null;
  }
  return JSON.parse(fs.readFileSync(sidecar, "utf8"));
}

export function assertDisjointIds(a: Dataset, b: Dataset, what: string): void {
  const ids = new Set(a.records.map((r) => r.id));
  for (const r of b.records) {
    if (ids.has(r.id)) {
      throw new Error(`${what}: id '${r.id}' appears in both splits`);
    }
  }
}

export function writeCsv(file: string, rows: string[][], header: string[]): void {
  fs.mkdirSync(path.dirname(file), { recursive: true });
  const body = [header.join(",")].concat(rows.map((r) => r.join(",")));
  fs.writeFileSync(file, body.join("\n") + "\n");
}
