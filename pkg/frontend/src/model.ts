/** Tiny 1-D CNN over integer-token sequences (vocabulary 5, padding = 4).
 *
 * embedding -> conv(k3, 16) -> ReLU -> conv(k3, 16) -> ReLU ->
 * global max pool -> dropout -> linear(numClasses)
 *
 * Padding tokens embed to the zero vector and their embedding row receives
 * no gradient, mirroring an embedding layer with a padding index. The
 * lookup runs as a one-hot matMul and the convolutions as unfold + matMul:
 * identical math to gather/conv1d, but with gradients that stay fast on
 * the pure-JS and wasm backends. Weights are plain variables so parameter
 * counting is exact and restarts are reproducible from an integer seed.
 */

import * as tf from "@tensorflow/tfjs";

export interface ModelConfig {
  vocabSize: number; // 5: four bases + padding
  tokenDim: number; // 8 or 256 in the reference setups
  numClasses: number;
  dropout: number;
}

export const FILTERS = 16;
export const KERNEL = 3;

export function expectedParamCount(cfg: ModelConfig): number {
  const emb = cfg.vocabSize * cfg.tokenDim;
  const conv1 = KERNEL * cfg.tokenDim * FILTERS + FILTERS;
  const conv2 = KERNEL * FILTERS * FILTERS + FILTERS;
  const fc = FILTERS * cfg.numClasses + cfg.numClasses;
  return emb + conv1 + conv2 + fc;
}

/** Width-3, stride-1, same-padded 1-D convolution via unfold + matMul.
 * Identical math to tf.conv1d but with much cheaper gradients on the pure
 * JS backend, whose conv backprop dominates training time otherwise.
 */
function convSame(x: tf.Tensor3D, kernel: tf.Tensor3D, bias: tf.Tensor): tf.Tensor3D {
  const [b, len, ch] = x.shape;
  const padded = tf.pad(x, [
    [0, 0],
    [1, 1],
    [0, 0],
  ]) as tf.Tensor3D;
  const cols = tf.concat(
    [
      padded.slice([0, 0, 0], [b, len, ch]),
      padded.slice([0, 1, 0], [b, len, ch]),
      padded.slice([0, 2, 0], [b, len, ch]),
    ],
    2
  );
  const filters = kernel.shape[2];
  const flat = cols.reshape([b * len, KERNEL * ch]).matMul(kernel.reshape([KERNEL * ch, filters]));
  return flat.reshape([b, len, filters]).add(bias) as tf.Tensor3D;
}

/** One-hot encode a batch of integer token rows for the model input. */
export function oneHotTokens(tokens: tf.Tensor2D): tf.Tensor3D {
  return tf.tidy(() => tf.oneHot(tokens.cast("int32"), 5).cast("float32") as tf.Tensor3D);
}

export class CnnClassifier {
  readonly cfg: ModelConfig;
  readonly embedding: tf.Variable;
  readonly conv1Kernel: tf.Variable;
  readonly conv1Bias: tf.Variable;
  readonly conv2Kernel: tf.Variable;
  readonly conv2Bias: tf.Variable;
  readonly fcWeight: tf.Variable;
  readonly fcBias: tf.Variable;

  constructor(cfg: ModelConfig, seed: number) {
    if (cfg.vocabSize !== 5) {
      throw new Error("token vocabulary is the four bases plus padding (5)");
    }
    if (cfg.dropout < 0 || cfg.dropout >= 1) {
      throw new Error("dropout must lie in [0, 1)");
    }
    this.cfg = cfg;
    const d = cfg.tokenDim;
    this.embedding = tf.variable(tf.randomNormal([5, d], 0, 1, "float32", seed + 1));
    this.conv1Kernel = tf.variable(
      tf.randomNormal([KERNEL, d, FILTERS], 0, Math.sqrt(2 / (KERNEL * d)), "float32", seed + 2)
    );
    this.conv1Bias = tf.variable(tf.zeros([FILTERS]));
    this.conv2Kernel = tf.variable(
      tf.randomNormal([KERNEL, FILTERS, FILTERS], 0, Math.sqrt(2 / (KERNEL * FILTERS)), "float32", seed + 3)
    );
    this.conv2Bias = tf.variable(tf.zeros([FILTERS]));
    this.fcWeight = tf.variable(
      tf.randomNormal([FILTERS, cfg.numClasses], 0, Math.sqrt(1 / FILTERS), "float32", seed + 4)
    );
    this.fcBias = tf.variable(tf.zeros([cfg.numClasses]));
  }

  get variables(): tf.Variable[] {
    return [
      this.embedding,
      this.conv1Kernel,
      this.conv1Bias,
      this.conv2Kernel,
      this.conv2Bias,
      this.fcWeight,
      this.fcBias,
    ];
  }

  paramCount(): number {
    return this.variables.reduce((acc, v) => acc + v.size, 0);
  }

  /** Logits for a batch of one-hot token rows [B, L, 5]; dropout only when
   * training. Use oneHotTokens() to prepare integer token batches. */
  forward(x1h: tf.Tensor3D, training = false, stepSeed = 0): tf.Tensor2D {
    return tf.tidy(() => {
      const [b, len] = [x1h.shape[0], x1h.shape[1]];
      // one-hot lookup; padding positions are zeroed so its row gets no grad
      const mask = tf.sub(1, x1h.slice([0, 0, 4], [b, len, 1]));
      let h = x1h
        .reshape([b * len, 5])
        .matMul(this.embedding as unknown as tf.Tensor2D)
        .reshape([b, len, this.cfg.tokenDim])
        .mul(mask) as tf.Tensor3D;
      h = convSame(h, this.conv1Kernel as unknown as tf.Tensor3D, this.conv1Bias).relu();
      h = convSame(h, this.conv2Kernel as unknown as tf.Tensor3D, this.conv2Bias).relu();
      let pooled = h.max(1) as tf.Tensor2D; // adaptive max pool to length 1
      if (training && this.cfg.dropout > 0) {
        pooled = tf.dropout(pooled, this.cfg.dropout, undefined, stepSeed) as tf.Tensor2D;
      }
      return pooled.matMul(this.fcWeight as unknown as tf.Tensor2D).add(this.fcBias) as tf.Tensor2D;
    });
  }

  predict(x1h: tf.Tensor3D): number[] {
    return tf.tidy(() => Array.from(this.forward(x1h, false).argMax(1).dataSync()));
  }

  snapshot(): tf.Tensor[] {
    return this.variables.map((v) => v.clone());
  }

  restore(weights: tf.Tensor[]): void {
    this.variables.forEach((v, i) => v.assign(weights[i] as tf.Tensor<tf.Rank>));
  }

  dispose(): void {
    this.variables.forEach((v) => v.dispose());
  }
}
