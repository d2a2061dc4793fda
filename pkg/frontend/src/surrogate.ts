/** Synthetic two-class dataset for exercising the crop benchmark.
 *
 * Each sequence is [signal | low-complexity filler | high-complexity filler].
 * Only the signal region carries class information (A-heavy vs T-heavy at
 * matched entropy); both fillers are drawn from class-independent
 * distributions. The filler mix is chosen so the whole-sequence n=1 entropy
 * sits near the signal windows' entropy level: complexity-matching crops
 * can find the informative region, position-based crops mostly cannot, and
 * a max-complexity crop is drawn to the uniform filler instead.
 */

import * as path from "path";

import { writeCsv } from "./data";
import { mulberry32 } from "./rng";

export interface SurrogateSpec {
  trainPerClass: number;
  devPerClass: number;
  testPerClass: number;
  length: number;
  signalLen: number;
  lowLen: number; // low-complexity filler length; remainder is uniform filler
  signalBias: number; // dominant-letter probability inside the signal
  seed: number;
}

export const DEFAULT_SURROGATE: SurrogateSpec = {
  trainPerClass: 100,
  devPerClass: 30,
  testPerClass: 100,
  length: 200,
  signalLen: 40,
  lowLen: 110,
  signalBias: 0.6,
  seed: 20260810,
};

const BASES = "ACGT";

function sampleFrom(probs: number[], rand: () => number): number {
  const r = rand();
  let acc = 0;
  for (let i = 0; i < probs.length; i++) {
    acc += probs[i];
    if (r < acc) return i;
  }
  return probs.length - 1;
}

function classProbs(label: number, bias: number): number[] {
  const rest = (1 - bias) / 3;
  // class 0 is A-heavy, class 1 is T-heavy; same entropy, different letters
  return label === 0 ? [bias, rest, rest, rest] : [rest, rest, rest, bias];
}

const LOW_FILLER = [0.1 / 3, 0.1 / 3, 0.9, 0.1 / 3]; // G-heavy, compresses well
const HIGH_FILLER = [0.25, 0.25, 0.25, 0.25];

export function makeSequence(label: number, spec: SurrogateSpec, rand: () => number): string {
  const out: string[] = [];
  const signalProbs = classProbs(label, spec.signalBias);
  for (let i = 0; i < spec.length; i++) {
    let probs: number[];
    if (i < spec.signalLen) {
      probs = signalProbs;
    } else if (i < spec.signalLen + spec.lowLen) {
      probs = LOW_FILLER;
    } else {
      probs = HIGH_FILLER;
    }
    out.push(BASES[sampleFrom(probs, rand)]);
  }
  return out.join("");
}

export interface SurrogateFiles {
  train: string;
  dev: string;
  test: string;
}

export function writeSurrogate(dir: string, spec: SurrogateSpec = DEFAULT_SURROGATE): SurrogateFiles {
  const rand = mulberry32(spec.seed);
  const splits: [keyof SurrogateFiles, string, number][] = [
    ["train", "t", spec.trainPerClass],
    ["dev", "d", spec.devPerClass],
    ["test", "e", spec.testPerClass],
  ];
  const files = {} as SurrogateFiles;
  for (const [split, prefix, perClass] of splits) {
    const rows: string[][] = [];
    for (let label = 0; label < 2; label++) {
      for (let i = 0; i < perClass; i++) {
        rows.push([`${prefix}${label}_${i}`, makeSequence(label, spec, rand), String(label)]);
      }
    }
    const file = path.join(dir, `${split}.csv`);
    writeCsv(file, rows, ["id", "sequence", "label"]);
    files[split] = file;
  }
  return files;
}
