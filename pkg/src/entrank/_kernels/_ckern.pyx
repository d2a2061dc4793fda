# cython: boundscheck=False, wraparound=False, cdivision=True
"""C implementations of the hot counting/entropy kernels.

Semantics match entrank._kernels.pyfallback exactly; see that module's
docstring. Only n with 4**n <= 2**24 is supported here (the dispatcher
routes larger n to the fallback), because counting uses a dense scratch
table of 4**n slots.
"""

import numpy as np

from libc.math cimport log2
from libc.math cimport NAN


cdef double _entropy_range(const unsigned char[::1] tokens, Py_ssize_t start,
                           Py_ssize_t length, int n, long long* counts,
                           long long* touched) noexcept nogil:
    cdef Py_ssize_t m = length // n
    cdef Py_ssize_t i, j, base
    cdef Py_ssize_t ntouched = 0
    cdef long long ident, c = 0
    cdef int skip
    cdef double s = 0.0
    cdef double a

    for i in range(m):
        base = start + i * n
        ident = 0
        skip = 0
        for j in range(n):
            if tokens[base + j] > 3:
                skip = 1
                break
            ident = ident * 4 + tokens[base + j]
        if skip:
            continue
        if counts[ident] == 0:
            touched[ntouched] = ident
            ntouched += 1
        counts[ident] += 1
        c += 1

    if c == 0:
        return NAN
    for i in range(ntouched):
        a = <double> counts[touched[i]]
        s += a * log2(a)
        counts[touched[i]] = 0
    return log2(<double> c) - s / <double> c


def ngram_entropy(const unsigned char[::1] tokens, int n):
    """Entropy of the whole token array treated as one block."""
    cdef Py_ssize_t size = tokens.shape[0]
    if size // n == 0:
        return float("nan")
    counts_arr = np.zeros(1 << (2 * n), dtype=np.int64)
    touched_arr = np.empty(size // n, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] touched = touched_arr
    cdef double out
    with nogil:
        out = _entropy_range(tokens, 0, size, n, &counts[0], &touched[0])
    return out


def block_entropies(const unsigned char[::1] tokens, Py_ssize_t T, int n):
    """Entropy of each of the floor(len/T) consecutive T-blocks."""
    cdef Py_ssize_t nb = tokens.shape[0] // T
    out_arr = np.empty(nb, dtype=np.float64)
    if nb == 0:
        return out_arr
    counts_arr = np.zeros(1 << (2 * n), dtype=np.int64)
    touched_arr = np.empty(T // n + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] touched = touched_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t b
    with nogil:
        for b in range(nb):
            out[b] = _entropy_range(tokens, b * T, T, n, &counts[0], &touched[0])
    return out_arr


def window_entropies(const unsigned char[::1] tokens, const long long[::1] starts,
                     Py_ssize_t win_len, int n):
    """Entropy of each window tokens[s : s + win_len], one block per window."""
    cdef Py_ssize_t k = starts.shape[0]
    out_arr = np.empty(k, dtype=np.float64)
    if k == 0:
        return out_arr
    counts_arr = np.zeros(1 << (2 * n), dtype=np.int64)
    touched_arr = np.empty(win_len // n + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] touched = touched_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(k):
            out[i] = _entropy_range(tokens, starts[i], win_len, n,
                                    &counts[0], &touched[0])
    return out_arr
