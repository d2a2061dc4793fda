#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Workloads mirror the package's hot paths: candidate-window scoring for the
crops, per-block entropy for the Monte-Carlo profiles, and whole-sequence
n-gram entropy. Run after `pip install -e .`:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from entrank._kernels import pyfallback

try:
    from entrank._kernels import _ckern
except ImportError:
    _ckern = None


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    long_seq = rng.integers(0, 4, 100_000, dtype=np.uint8)
    dataset = [rng.integers(0, 4, 1500, dtype=np.uint8) for _ in range(200)]
    starts22 = rng.integers(0, 1500 - 22 + 1, size=64).astype(np.int64)
    starts98 = rng.integers(0, 1500 - 98 + 1, size=64).astype(np.int64)

    workloads = [
        (
            "window_entropies: 200 seqs x 64 windows of 22, n=1 (crop scoring)",
            lambda mod: [mod.window_entropies(s, starts22, 22, 1) for s in dataset],
        ),
        (
            "window_entropies: 200 seqs x 64 windows of 98, n=2",
            lambda mod: [mod.window_entropies(s, starts98, 98, 2) for s in dataset],
        ),
        (
            "block_entropies: 100k tokens, T=22, n=1 (profiles)",
            lambda mod: mod.block_entropies(long_seq, 22, 1),
        ),
        (
            "block_entropies: 100k tokens, T=98, n=2",
            lambda mod: mod.block_entropies(long_seq, 98, 2),
        ),
        (
            "ngram_entropy: 200 seqs, n=6 (full-sequence axis)",
            lambda mod: [mod.ngram_entropy(s, 6) for s in dataset],
        ),
    ]

    print(f"{'workload':66s} {'numpy':>9s} {'cython':>9s} {'speedup':>8s}")
    for name, job in workloads:
        t_py = timeit(lambda: job(pyfallback))
        if _ckern is None:
            print(f"{name:66s} {t_py * 1e3:8.2f}ms {'n/a':>9s} {'':>8s}")
            continue
        t_c = timeit(lambda: job(_ckern))
        a = job(pyfallback)
        b = job(_ckern)
        same = np.allclose(np.asarray(a, dtype=float).ravel(),
                           np.asarray(b, dtype=float).ravel(), atol=1e-12, equal_nan=True)
        flag = "" if same else "  MISMATCH!"
        print(f"{name:66s} {t_py * 1e3:8.2f}ms {t_c * 1e3:8.2f}ms {t_py / t_c:7.1f}x{flag}")

    if _ckern is None:
        print("\ncompiled extension not importable; only the fallback was timed")


if __name__ == "__main__":
    main()
