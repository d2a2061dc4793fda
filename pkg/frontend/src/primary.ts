/** Bridge to the primary entrank CLI: crops are precomputed augmented files. */

import { execFileSync } from "child_process";
import * as fs from "fs";
import * as path from "path";

export const CROP_METHODS = ["basic", "random", "entropy", "kolmogorov", "ratio"] as const;
export type CropMethod = (typeof CROP_METHODS)[number];

export interface CropOptions {
  method: CropMethod;
  targetLen: number;
  T: number;
  n: number;
  seed: number;
  numCandidates?: number;
  offsetRatio?: number;
  alpha?: number;
  beta?: number;
  cacheDir?: string;
}

function pythonCmd(): string {
  return process.env.ENTRANK_PYTHON ?? "python3";
}

/** Invoke `entrank crop` on a dataset file; returns the output path. */
export function runPrimaryCrop(input: string, output: string, opts: CropOptions): string {
  fs.mkdirSync(path.dirname(output), { recursive: true });
  const args = [
    "-m",
    "entrank.cli",
    "crop",
    input,
    "--method",
    opts.method,
    "--target-len",
    String(opts.targetLen),
    "--T",
    String(opts.T),
    "--n",
    String(opts.n),
    "--seed",
    String(opts.seed),
    "--out",
    output,
  ];
  if (opts.numCandidates !== undefined) args.push("--num-candidates", String(opts.numCandidates));
  if (opts.offsetRatio !== undefined) args.push("--offset-ratio", String(opts.offsetRatio));
  if (opts.alpha !== undefined) args.push("--alpha", String(opts.alpha));
  if (opts.beta !== undefined) args.push("--beta", String(opts.beta));
  if (opts.cacheDir !== undefined) args.push("--cache-dir", opts.cacheDir);
  execFileSync(pythonCmd(), args, { stdio: ["ignore", "inherit", "inherit"] });
  return output;
}

export function primaryAvailable(): boolean {
  try {
    execFileSync(pythonCmd(), ["-c", "import entrank"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}
