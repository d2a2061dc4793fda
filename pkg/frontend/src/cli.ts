/** End-to-end benchmark driver.
 *
 * Generates the synthetic two-class dataset, asks the primary entrank CLI
 * to produce one augmented train/dev/test triple per crop method, trains
 * the small CNN over repeated restarts, and writes
 * results_<dataset>_<tokendim>.csv next to a printed table.
 */

import * as path from "path";

import { initBackend } from "./backend";
import { BenchSpec, VariantFiles, formatTable, runBenchmark, writeResultsCsv } from "./bench";
import { CROP_METHODS, CropMethod, primaryAvailable, runPrimaryCrop } from "./primary";
import { childSeed } from "./rng";
import { DEFAULT_SURROGATE, SurrogateFiles, writeSurrogate } from "./surrogate";

export interface DriverOptions {
  outDir: string;
  tokenDim: number;
  restarts: number;
  seed: number;
  maxEpochs: number;
  patience: number;
  targetLen: number;
  T: number;
  n: number;
  numCandidates: number;
  quiet: boolean;
}

export const DEFAULT_DRIVER: DriverOptions = {
  outDir: "bench_out",
  tokenDim: 8,
  restarts: 10,
  seed: 1,
  maxEpochs: 60,
  patience: 10,
  targetLen: 22,
  T: 22,
  n: 1,
  numCandidates: 12,
  quiet: false,
};

export function cropAllVariants(
  base: SurrogateFiles,
  outDir: string,
  opts: DriverOptions
): Record<string, VariantFiles> {
  const variants: Record<string, VariantFiles> = {};
  for (const method of CROP_METHODS) {
    const files = {} as VariantFiles;
    for (const split of ["train", "dev", "test"] as const) {
      files[split] = runPrimaryCrop(
        base[split],
        path.join(outDir, "aug", method, `${split}.csv`),
        {
          method: method as CropMethod,
          targetLen: opts.targetLen,
          T: opts.T,
          n: opts.n,
          seed: childSeed(opts.seed, `${method}/${split}`),
          numCandidates: opts.numCandidates,
          offsetRatio: 1.0,
          alpha: 1.0,
          beta: 0.0,
          cacheDir: path.join(outDir, "cache"),
        }
      );
    }
    variants[method] = files;
  }
  return variants;
}

export async function runDriver(opts: DriverOptions): Promise<void> {
  if (!primaryAvailable()) {
    throw new Error(
      "the primary entrank package is not importable; install it first (pip install -e ..)"
    );
  }
  console.log(`tfjs backend: ${await initBackend()}`);
  const base = writeSurrogate(path.join(opts.outDir, "base"), {
    ...DEFAULT_SURROGATE,
    seed: childSeed(opts.seed, "surrogate"),
  });
  const variants = cropAllVariants(base, opts.outDir, opts);
  const spec: BenchSpec = {
    variants,
    tokenDim: opts.tokenDim,
    restarts: opts.restarts,
    seed: opts.seed,
    maxEpochs: opts.maxEpochs,
    patience: opts.patience,
    quiet: opts.quiet,
  };
  const results = await runBenchmark(spec);
  const out = path.join(opts.outDir, `results_surrogate_${opts.tokenDim}.csv`);
  writeResultsCsv(out, results);
  console.log(formatTable(results));
  console.log(`results written to ${out}`);
}

function parseArgs(argv: string[]): DriverOptions {
  const opts = { ...DEFAULT_DRIVER };
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    switch (key) {
      case "--out-dir":
        opts.outDir = val;
        break;
      case "--token-dim":
        opts.tokenDim = Number(val);
        break;
      case "--restarts":
        opts.restarts = Number(val);
        break;
      case "--seed":
        opts.seed = Number(val);
        break;
      case "--max-epochs":
        opts.maxEpochs = Number(val);
        break;
      case "--patience":
        opts.patience = Number(val);
        break;
      case "--quiet":
        opts.quiet = true;
        i -= 1;
        break;
      default:
        throw new Error(`unknown flag ${key}`);
    }
  }
  return opts;
}

if (require.main === module) {
  runDriver(parseArgs(process.argv.slice(2))).catch((err) => {
    console.error(err.message ?? err);
    process.exit(1);
  });
}
