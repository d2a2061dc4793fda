"""Kernel backend selection.

The hot kernels (non-overlapping n-gram counting + entropy over blocks and
candidate windows) exist twice: a compiled Cython extension and a numpy
fallback with identical semantics. The extension is preferred when it
imported successfully; set ENTRANK_PURE_PYTHON=1 to force the fallback.

The compiled path uses a dense 4**n count table, so very large n (where
4**n would not fit in memory) is always routed to the fallback, which
counts sparsely.
"""

from __future__ import annotations

import os

import numpy as np

from . import pyfallback

if os.environ.get("ENTRANK_PURE_PYTHON"):
    _ckern = None
else:
    try:
        from . import _ckern  # type: ignore[attr-defined]
    except ImportError:
        _ckern = None

BACKEND = "cython" if _ckern is not None else "python"

# dense scratch is 4**n int64 slots; 4**10 = 8 MiB is the ceiling we accept
_MAX_DENSE_N = 10


def _as_tokens(tokens) -> np.ndarray:
    arr = np.ascontiguousarray(tokens, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("token array must be one-dimensional")
    return arr


def ngram_entropy(tokens, n: int) -> float:
    """Entropy of the whole token array treated as a single block.

    Returns NaN when no complete padding-free n-gram exists.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    arr = _as_tokens(tokens)
    if _ckern is not None and n <= _MAX_DENSE_N:
        return _ckern.ngram_entropy(arr, n)
    return pyfallback.ngram_entropy(arr, n)


def block_entropies(tokens, T: int, n: int) -> np.ndarray:
    """Per-block entropies for the floor(len/T) consecutive T-blocks."""
    if T < 1 or n < 1:
        raise ValueError("T and n must be >= 1")
    arr = _as_tokens(tokens)
    if _ckern is not None and n <= _MAX_DENSE_N:
        return _ckern.block_entropies(arr, T, n)
    return pyfallback.block_entropies(arr, T, n)


def window_entropies(tokens, starts, win_len: int, n: int) -> np.ndarray:
    """Entropy of each window tokens[s : s + win_len] as one block."""
    if win_len < 1 or n < 1:
        raise ValueError("win_len and n must be >= 1")
    arr = _as_tokens(tokens)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if starts.size and (starts.min() < 0 or starts.max() > arr.size - win_len):
        raise ValueError("window start out of range")
    if _ckern is not None and n <= _MAX_DENSE_N:
        return _ckern.window_entropies(arr, starts, win_len, n)
    return pyfallback.window_entropies(arr, starts, win_len, n)


def nonzero_counts(tokens, n: int) -> tuple[list[int], np.ndarray]:
    """Sorted (tuple identities, counts) over non-overlapping n-grams.

    Identities are the big-endian base-4 values of the n tokens (exact
    Python ints, valid for any n). Padding-bearing n-grams are skipped.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    arr = pyfallback._grouped(_as_tokens(tokens), n)
    if arr.shape[0] == 0:
        return [], np.empty(0, dtype=np.int64)
    if n <= 31:
        powers = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
        ids, counts = np.unique(arr.astype(np.int64) @ powers, return_counts=True)
        return [int(i) for i in ids], counts.astype(np.int64)
    rows, counts = np.unique(arr, axis=0, return_counts=True)
    ids = [int("".join(str(t) for t in row), 4) for row in rows]
    order = np.argsort(ids)
    return [ids[i] for i in order], counts[order].astype(np.int64)
