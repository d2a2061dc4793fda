"""Numpy implementations of the counting/entropy kernels.

Reference semantics for both backends:

* tokens are uint8 values in {0,1,2,3,4}; 4 is the padding symbol
* n-grams are non-overlapping, taken at offsets 0, n, 2n, ...; the trailing
  ``len mod n`` tokens are dropped
* an n-gram containing the padding token is skipped entirely and does not
  count toward c
* entropy is base 2: ``log2(c) - (1/c) * sum(a * log2(a))`` over the
  non-zero counts a; a region with c == 0 yields NaN
"""

from __future__ import annotations

import math

import numpy as np

_PAD = 4


def _grouped(tokens: np.ndarray, n: int) -> np.ndarray:
    """Rows of non-overlapping n-grams with padding-bearing rows removed."""
    m = tokens.size // n
    if m == 0:
        return tokens[:0].reshape(0, n)
    arr = tokens[: m * n].reshape(m, n)
    if n == 1:
        return arr[arr[:, 0] != _PAD]
    return arr[~(arr == _PAD).any(axis=1)]


def _row_counts(arr: np.ndarray) -> np.ndarray:
    """Occurrence counts of the distinct rows of arr (order not specified)."""
    n = arr.shape[1]
    if n <= 31:
        powers = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
        ids = arr.astype(np.int64) @ powers
        return np.unique(ids, return_counts=True)[1]
    return np.unique(arr, axis=0, return_counts=True)[1]


def _entropy_from_counts(counts: np.ndarray) -> float:
    c = int(counts.sum())
    if c == 0:
        return math.nan
    counts = counts.astype(np.float64)
    return math.log2(c) - float(np.sum(counts * np.log2(counts))) / c


def ngram_entropy(tokens: np.ndarray, n: int) -> float:
    """Entropy of the whole token array treated as one block."""
    arr = _grouped(tokens, n)
    if arr.shape[0] == 0:
        return math.nan
    return _entropy_from_counts(_row_counts(arr))


def _single_symbol_entropies(rows: np.ndarray) -> np.ndarray:
    """Per-row entropy for n=1 rows of shape (k, width)."""
    counts = np.stack([(rows == s).sum(axis=1) for s in range(4)], axis=1)
    c = counts.sum(axis=1).astype(np.float64)
    counts = counts.astype(np.float64)
    plogp = np.zeros_like(counts)
    mask = counts > 0
    plogp[mask] = counts[mask] * np.log2(counts[mask])
    out = np.full(rows.shape[0], np.nan)
    nz = c > 0
    out[nz] = np.log2(c[nz]) - plogp.sum(axis=1)[nz] / c[nz]
    return out


def block_entropies(tokens: np.ndarray, T: int, n: int) -> np.ndarray:
    """Entropy of each of the floor(len/T) consecutive T-blocks."""
    nb = tokens.size // T
    if nb == 0:
        return np.empty(0, dtype=np.float64)
    body = tokens[: nb * T].reshape(nb, T)
    if n == 1:
        return _single_symbol_entropies(body)
    out = np.empty(nb, dtype=np.float64)
    for b in range(nb):
        out[b] = ngram_entropy(body[b], n)
    return out


def window_entropies(tokens: np.ndarray, starts: np.ndarray, win_len: int, n: int) -> np.ndarray:
    """Entropy of each window tokens[s : s + win_len], one block per window."""
    k = starts.size
    if k == 0:
        return np.empty(0, dtype=np.float64)
    if n == 1:
        idx = starts[:, None] + np.arange(win_len, dtype=np.int64)[None, :]
        return _single_symbol_entropies(tokens[idx])
    out = np.empty(k, dtype=np.float64)
    for i, s in enumerate(starts):
        out[i] = ngram_entropy(tokens[s : s + win_len], n)
    return out
