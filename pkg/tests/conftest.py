"""Shared fixtures and independent brute-force oracles.

The oracles enumerate words directly and compute entropies with their own
arithmetic; they never touch the partition/key machinery they are used to
check.
"""

import numpy as np
import pytest

import entrank as er


def all_words(num_letters: int) -> np.ndarray:
    """Every base-4 word of the given length, one row per word."""
    idx = np.arange(4 ** num_letters, dtype=np.int64)
    shifts = 2 * np.arange(num_letters - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 3).astype(np.uint8)


def oracle_word_entropies(words: np.ndarray, n: int) -> np.ndarray:
    """Entropy of each word over its non-overlapping n-grams.

    Computed straight from the definition: -sum (a/c) log2 (a/c) with the
    trailing len mod n letters dropped.
    """
    rows, width = words.shape
    m = width // n
    body = words[:, : m * n].reshape(rows, m, n)
    powers = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    ids = (body.astype(np.int64) * powers[None, None, :]).sum(axis=2)
    lam = 4 ** n
    counts = np.stack([(ids == j).sum(axis=1) for j in range(lam)], axis=1).astype(np.float64)
    c = float(m)
    probs = counts / c
    plogp = np.zeros_like(probs)
    mask = probs > 0
    plogp[mask] = probs[mask] * np.log2(probs[mask])
    return -plogp.sum(axis=1)


def oracle_entropy_histogram(T: int, n: int) -> list[tuple[float, int]]:
    """(entropy, word count) pairs over all 4**(n*floor(T/n)) blocks.

    Equal entropies are clustered with a 1e-9 gap; returns ascending order.
    """
    m = T // n
    words = all_words(m * n)
    ents = np.sort(oracle_word_entropies(words, n))
    clusters: list[tuple[float, int]] = []
    start = 0
    for i in range(1, len(ents) + 1):
        if i == len(ents) or ents[i] - ents[i - 1] > 1e-9:
            clusters.append((float(ents[start:i].mean()), i - start))
            start = i
    return clusters


def oracle_partitions(c: int, max_parts: int) -> set[tuple[int, ...]]:
    """Partitions of c into at most max_parts positive parts, brute force."""
    found = {()} if c == 0 else set()
    if c == 0:
        return found

    def rec(remaining, prefix):
        if remaining == 0:
            found.add(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        hi = min(remaining, prefix[-1] if prefix else remaining)
        for nxt in range(1, hi + 1):
            rec(remaining - nxt, prefix + [nxt])

    rec(c, [])
    return found


def oracle_count_words(parts: tuple[int, ...], lam: int) -> int:
    """Count words whose sorted frequency vector equals parts, brute force.

    Only usable for tiny lam**c; enumerates every word.
    """
    c = sum(parts)
    target = tuple(sorted(parts, reverse=True))
    count = 0
    words = np.arange(lam ** c, dtype=np.int64)
    for w in words:
        freq = [0] * lam
        v = int(w)
        for _ in range(c):
            freq[v % lam] += 1
            v //= lam
        sig = tuple(sorted((f for f in freq if f), reverse=True))
        if sig == target:
            count += 1
    return count


@pytest.fixture(scope="session")
def dist_t4():
    return er.build_distribution(4, 1)


@pytest.fixture(scope="session")
def dist_t8():
    return er.build_distribution(8, 1)


@pytest.fixture(scope="session")
def dist_t22():
    return er.build_distribution(22, 1)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
