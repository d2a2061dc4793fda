/** Macro-averaged classification metrics and the restart margin of error. */

export function confusionMatrix(yTrue: number[], yPred: number[], numClasses: number): number[][] {
  if (yTrue.length !== yPred.length) {
    throw new Error("label arrays must align");
  }
  const cm = Array.from({ length: numClasses }, () => new Array(numClasses).fill(0));
  for (let i = 0; i < yTrue.length; i++) {
    cm[yTrue[i]][yPred[i]] += 1;
  }
  return cm;
}

export function accuracy(cm: number[][]): number {
  let correct = 0;
  let total = 0;
  for (let i = 0; i < cm.length; i++) {
    for (let j = 0; j < cm.length; j++) {
      total += cm[i][j];
      if (i === j) correct += cm[i][j];
    }
  }
  return total === 0 ? 0 : correct / total;
}

/** Unweighted mean of per-class recall; absent classes contribute 0. */
export function macroRecall(cm: number[][]): number {
  let sum = 0;
  for (let i = 0; i < cm.length; i++) {
    const rowTotal = cm[i].reduce((a, b) => a + b, 0);
    sum += rowTotal === 0 ? 0 : cm[i][i] / rowTotal;
  }
  return sum / cm.length;
}

export function macroPrecision(cm: number[][]): number {
  let sum = 0;
  for (let j = 0; j < cm.length; j++) {
    let colTotal = 0;
    for (let i = 0; i < cm.length; i++) colTotal += cm[i][j];
    sum += colTotal === 0 ? 0 : cm[j][j] / colTotal;
  }
  return sum / cm.length;
}

/** Unweighted mean of per-class F1 (harmonic mean of precision and recall). */
export function macroF1(cm: number[][]): number {
  let sum = 0;
  for (let k = 0; k < cm.length; k++) {
    const rowTotal = cm[k].reduce((a, b) => a + b, 0);
    let colTotal = 0;
    for (let i = 0; i < cm.length; i++) colTotal += cm[i][k];
    const recall = rowTotal === 0 ? 0 : cm[k][k] / rowTotal;
    const precision = colTotal === 0 ? 0 : cm[k][k] / colTotal;
    sum += precision + recall === 0 ? 0 : (2 * precision * recall) / (precision + recall);
  }
  return sum / cm.length;
}

/** Population mean/std; a single restart reports std 0. */
export function meanStd(values: number[]): { mean: number; std: number } {
  if (values.length === 0) {
    throw new Error("need at least one value");
  }
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  const varSum = values.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return { mean, std: Math.sqrt(varSum / values.length) };
}

/** 95% margin of error across restarts: 1.96 * std / sqrt(restarts). */
export function marginOfError(std: number, restarts: number): number {
  if (restarts < 1) {
    throw new Error("restarts must be >= 1");
  }
  return (1.96 * std) / Math.sqrt(restarts);
}
