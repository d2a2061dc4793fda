/** tfjs backend selection: wasm when available, pure-JS cpu otherwise. */

import * as path from "path";

import * as tf from "@tensorflow/tfjs";

export async function initBackend(): Promise<string> {
  const forced = process.env.ENTRANK_BENCH_BACKEND;
  if (forced === "cpu") {
    await tf.setBackend("cpu");
    return "cpu";
  }
  try {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    const wasm = require("@tensorflow/tfjs-backend-wasm");
    wasm.setWasmPaths(path.dirname(require.resolve("@tensorflow/tfjs-backend-wasm")) + path.sep);
    if (await tf.setBackend("wasm")) {
      return "wasm";
    }
  } catch {
    // fall through to cpu
  }
  await tf.setBackend("cpu");
  return "cpu";
}
