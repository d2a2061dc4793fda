/** Benchmark protocol: train the small CNN on each crop variant's
 * precomputed augmented dataset over repeated restarts and report
 * macro-averaged metrics with their restart margin of error.
 */

import * as fs from "fs";

import * as tf from "@tensorflow/tfjs";

import { Dataset, assertDisjointIds, loadDataset, writeCsv } from "./data";
import { accuracy, confusionMatrix, macroF1, macroRecall, marginOfError, meanStd } from "./metrics";
import { CnnClassifier, oneHotTokens } from "./model";
import { childSeed, mulberry32, shuffled } from "./rng";

export interface VariantFiles {
  train: string;
  dev: string;
  test: string;
}

export interface BenchSpec {
  variants: Record<string, VariantFiles>;
  tokenDim: number;
  dropout?: number; // default 0.3
  restarts?: number; // default 40
  batchSize?: number; // default 32
  learningRate?: number; // default 1e-3
  maxEpochs?: number; // default 200
  patience?: number; // default 20 epochs without dev improvement
  seed?: number;
  quiet?: boolean;
}

export interface VariantResult {
  variant: string;
  accMean: number;
  accStd: number;
  recMean: number;
  recStd: number;
  f1Mean: number;
  f1Std: number;
  moe: number;
}

interface TensorSplit {
  x: tf.Tensor3D; // one-hot [N, L, 5]
  labels: number[];
}

function toTensors(ds: Dataset): TensorSplit {
  const n = ds.records.length;
  const flat = new Int32Array(n * ds.seqLen);
  ds.records.forEach((r, i) => flat.set(r.tokens, i * ds.seqLen));
  const ints = tf.tensor2d(flat, [n, ds.seqLen], "int32");
  const x = oneHotTokens(ints);
  ints.dispose();
  return { x, labels: ds.records.map((r) => r.label) };
}

function evalSplit(model: CnnClassifier, split: TensorSplit, numClasses: number) {
  const preds = model.predict(split.x);
  const cm = confusionMatrix(split.labels, preds, numClasses);
  return { acc: accuracy(cm), rec: macroRecall(cm), f1: macroF1(cm) };
}

function trainOneRestart(
  train: TensorSplit,
  dev: TensorSplit,
  numClasses: number,
  spec: Required<Pick<BenchSpec, "tokenDim" | "dropout" | "batchSize" | "learningRate" | "maxEpochs" | "patience">>,
  restartSeed: number
): CnnClassifier {
  const model = new CnnClassifier(
    { vocabSize: 5, tokenDim: spec.tokenDim, numClasses, dropout: spec.dropout },
    restartSeed
  );
  const optimizer = tf.train.adam(spec.learningRate);
  const n = train.labels.length;
  let bestDevAcc = -1;
  let bestWeights: tf.Tensor[] | null = null;
  let sinceBest = 0;

  for (let epoch = 0; epoch < spec.maxEpochs; epoch++) {
    const order = shuffled(n, mulberry32(childSeed(restartSeed, `epoch${epoch}`)));
    for (let start = 0; start < n; start += spec.batchSize) {
      const idx = order.slice(start, start + spec.batchSize);
      const stepSeed = childSeed(restartSeed, `step${epoch}:${start}`);
      tf.tidy(() => {
        const xb = tf.gather(train.x, idx) as tf.Tensor3D;
        const yb = tf.oneHot(idx.map((i) => train.labels[i]), numClasses);
        optimizer.minimize(
          () => tf.losses.softmaxCrossEntropy(yb, model.forward(xb, true, stepSeed)) as tf.Scalar,
          false,
          model.variables as unknown as tf.Variable[]
        );
      });
    }
    const devAcc = evalSplit(model, dev, numClasses).acc;
    if (devAcc > bestDevAcc) {
      bestDevAcc = devAcc;
      if (bestWeights) bestWeights.forEach((t) => t.dispose());
      bestWeights = model.snapshot();
      sinceBest = 0;
    } else {
      sinceBest += 1;
      if (sinceBest >= spec.patience) break;
    }
  }
  if (bestWeights) {
    model.restore(bestWeights);
    bestWeights.forEach((t) => t.dispose());
  }
  optimizer.dispose();
  return model;
}

export async function runBenchmark(spec: BenchSpec): Promise<VariantResult[]> {
  const restarts = spec.restarts ?? 40;
  const hp = {
    tokenDim: spec.tokenDim,
    dropout: spec.dropout ?? 0.3,
    batchSize: spec.batchSize ?? 32,
    learningRate: spec.learningRate ?? 1e-3,
    maxEpochs: spec.maxEpochs ?? 200,
    patience: spec.patience ?? 20,
  };
  if (restarts < 1) {
    throw new Error("restarts must be >= 1");
  }

  const missing: string[] = [];
  for (const [variant, files] of Object.entries(spec.variants)) {
    for (const key of ["train", "dev", "test"] as const) {
      if (!fs.existsSync(files[key])) {
        missing.push(`${variant}:${key} (${files[key]})`);
      }
    }
  }
  if (missing.length > 0) {
    throw new Error(`augmented data missing for: ${missing.join(", ")}`);
  }

  const results: VariantResult[] = [];
  for (const [variant, files] of Object.entries(spec.variants)) {
    const trainDs = loadDataset(files.train);
    const devDs = loadDataset(files.dev);
    const testDs = loadDataset(files.test);
    const numClasses = Math.max(trainDs.numClasses, devDs.numClasses, testDs.numClasses);
    const train = toTensors(trainDs);
    const dev = toTensors(devDs);
    const test = toTensors(testDs);

    const accs: number[] = [];
    const recs: number[] = [];
    const f1s: number[] = [];
    for (let r = 0; r < restarts; r++) {
      // the model must never have seen the test records
      assertDisjointIds(trainDs, testDs, `${variant} train/test`);
      assertDisjointIds(devDs, testDs, `${variant} dev/test`);
      assertDisjointIds(trainDs, devDs, `${variant} train/dev`);
      const restartSeed = childSeed(spec.seed ?? 1, `${variant}#${r}`);
      const model = trainOneRestart(train, dev, numClasses, hp, restartSeed);
      const m = evalSplit(model, test, numClasses);
      model.dispose();
      accs.push(m.acc);
      recs.push(m.rec);
      f1s.push(m.f1);
      if (!spec.quiet) {
        console.log(`${variant} restart ${r + 1}/${restarts}: acc=${m.acc.toFixed(3)}`);
      }
    }
    const acc = meanStd(accs);
    const rec = meanStd(recs);
    const f1 = meanStd(f1s);
    results.push({
      variant,
      accMean: acc.mean,
      accStd: acc.std,
      recMean: rec.mean,
      recStd: rec.std,
      f1Mean: f1.mean,
      f1Std: f1.std,
      moe: marginOfError(acc.std, restarts),
    });
    train.x.dispose();
    dev.x.dispose();
    test.x.dispose();
  }
  return results;
}

export const RESULTS_HEADER = [
  "variant",
  "acc_mean",
  "acc_std",
  "rec_mean",
  "rec_std",
  "f1_mean",
  "f1_std",
  "moe",
];

export function writeResultsCsv(file: string, results: VariantResult[]): void {
  const rows = results.map((r) => [
    r.variant,
    r.accMean.toFixed(6),
    r.accStd.toFixed(6),
    r.recMean.toFixed(6),
    r.recStd.toFixed(6),
    r.f1Mean.toFixed(6),
    r.f1Std.toFixed(6),
    r.moe.toFixed(6),
  ]);
  writeCsv(file, rows, RESULTS_HEADER);
}

export function formatTable(results: VariantResult[]): string {
  const lines = ["variant               accuracy          recall            F1                moe"];
  for (const r of results) {
    lines.push(
      `${r.variant.padEnd(20)}  ${r.accMean.toFixed(3)} ± ${r.accStd.toFixed(3)}     ` +
        `${r.recMean.toFixed(3)} ± ${r.recStd.toFixed(3)}     ` +
        `${r.f1Mean.toFixed(3)} ± ${r.f1Std.toFixed(3)}     ${r.moe.toFixed(4)}`
    );
  }
  return lines.join("\n");
}
