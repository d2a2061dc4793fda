"""Exact block-entropy distributions from ordered integer partitions.

A padding-free block of length T holds c = floor(T/n) non-overlapping
n-grams over an effective alphabet of lam = 4**n symbols. Forgetting symbol
identity, every frequency vector is an ordered partition P of c into at
most lam positive parts, and the number of blocks realizing P is

    O(P) = lam! / ((lam - k)! * gamma) * c! / prod(p_i!)

with k positive parts and gamma the product of factorials of part-value
multiplicities. Grouping O(P) by the entropy of P gives the full counting
distribution; the rank ratio of an observed block is the exact cumulative
fraction at its entropy.

Entropy values are compared exactly: S(P) = log2(c) - log2(W)/c where
W = prod(p_i ** p_i), so at fixed c two partitions share an entropy value
iff they share W (unique factorization makes {log2 q : q prime} rationally
independent), and ascending entropy is descending W. W is kept as an exact
big integer; no floating-point comparison ever decides a tie.
"""

from __future__ import annotations

import math
import os
import tempfile
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import _kernels
from .entropy import EntropyValue
from .errors import ContextMismatchError, ResourceGuardError, ValidationError
from .seqcore import EncodedSequence

DEFAULT_MAX_PARTITIONS = 10_000_000
DEFAULT_MAX_PAIRS = 10_000_000
FLOAT_MATCH_TOL = 1e-9

CACHE_HEADER = "entrank-dist v1"


def enumerate_partitions(c: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    """All partitions of c into at most max_parts positive parts.

    Yielded as non-increasing tuples in lexicographically decreasing order;
    c = 0 yields the single empty partition.
    """
    if c < 0 or max_parts < 1:
        raise ValidationError("need c >= 0 and max_parts >= 1")

    def rec(remaining: int, cap: int, slots: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        smallest = -(-remaining // slots)  # ceil: first part must carry its share
        for first in range(min(remaining, cap), smallest - 1, -1):
            for rest in rec(remaining - first, first, slots - 1):
                yield (first,) + rest

    yield from rec(c, c, max_parts)


@lru_cache(maxsize=None)
def partition_count(c: int, max_parts: int) -> int:
    """Number of partitions of c into at most max_parts parts (cheap DP)."""
    if c < 0 or max_parts < 1:
        raise ValidationError("need c >= 0 and max_parts >= 1")
    if c == 0:
        return 1
    k = min(max_parts, c)
    dp = [1] + [0] * c
    for part in range(1, k + 1):
        for j in range(part, c + 1):
            dp[j] += dp[j - part]
    return dp[c]


def count_words(parts: Iterable[int], lam: int) -> int:
    """Exact number of length-c words over lam symbols whose sorted
    frequency vector equals the partition."""
    parts = tuple(parts)
    k = len(parts)
    if k > lam:
        raise ValidationError(f"partition has {k} parts but alphabet size is {lam}")
    if any(p < 1 for p in parts):
        raise ValidationError("parts must be positive")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValidationError("parts must be non-increasing")
    if k == 0:
        return 1
    assignments = 1
    for i in range(k):
        assignments *= lam - i
    gamma = 1
    run = 1
    for prev, cur in zip(parts, parts[1:]):
        if cur == prev:
            run += 1
            gamma *= run
        else:
            run = 1
    assignments //= gamma
    c = sum(parts)
    denom = 1
    for p in parts:
        denom *= math.factorial(p)
    return assignments * (math.factorial(c) // denom)


@lru_cache(maxsize=None)
def _factorization(v: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of a small positive integer."""
    out = []
    d = 2
    while d * d <= v:
        if v % d == 0:
            e = 0
            while v % d == 0:
                v //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if v > 1:
        out.append((v, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def _self_power(p: int) -> int:
    return p ** p


class EntropyKey:
    """Exact identifier of an entropy value at fixed total count c.

    exponents maps prime q to e_q = sum_i p_i * v_q(p_i); weight is the
    integer prod(q ** e_q) = prod(p_i ** p_i). Keys of merged multi-block
    observations carry the summed exponents and the total tuple count.
    """

    __slots__ = ("c", "exponents", "weight")

    def __init__(self, c: int, exponents: tuple[tuple[int, int], ...], weight: int | None = None):
        if c < 1:
            raise ValidationError("entropy key needs c >= 1")
        self.c = c
        self.exponents = tuple(sorted(exponents))
        if weight is None:
            weight = 1
            for q, e in self.exponents:
                weight *= q ** e
        self.weight = weight

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "EntropyKey":
        """Key of the entropy of a frequency vector (zero counts ignored)."""
        acc: dict[int, int] = {}
        c = 0
        weight = 1
        for p in counts:
            p = int(p)
            if p == 0:
                continue
            if p < 0:
                raise ValidationError("counts must be non-negative")
            c += p
            weight *= _self_power(p)
            for q, e in _factorization(p):
                acc[q] = acc.get(q, 0) + p * e
        if c == 0:
            raise ValidationError("entropy key needs at least one counted n-gram")
        return cls(c, tuple(acc.items()), weight)

    def combine(self, other: "EntropyKey") -> "EntropyKey":
        """Key of the summed entropies of two independent blocks."""
        acc = dict(self.exponents)
        for q, e in other.exponents:
            acc[q] = acc.get(q, 0) + e
        return EntropyKey(self.c + other.c, tuple(acc.items()), self.weight * other.weight)

    def canonical_string(self) -> str:
        if not self.exponents:
            return "1"
        return ",".join(f"{q}^{e}" for q, e in self.exponents)

    @classmethod
    def from_string(cls, text: str, c: int) -> "EntropyKey":
        if text == "1":
            return cls(c, ())
        exponents = []
        for item in text.split(","):
            q, _, e = item.partition("^")
            exponents.append((int(q), int(e)))
        return cls(c, tuple(exponents))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntropyKey):
            return NotImplemented
        return self.c == other.c and self.weight == other.weight

    def __hash__(self) -> int:
        return hash((self.c, self.weight))

    def __repr__(self) -> str:
        return f"EntropyKey(c={self.c}, {self.canonical_string()})"


class RankRatio(NamedTuple):
    """Exact rank ratio with its double rendering."""

    fraction: Fraction
    value: float

    def __float__(self) -> float:
        return self.value


def _make_ratio(numerator: int, total: int) -> RankRatio:
    frac = Fraction(numerator, total)
    return RankRatio(frac, float(frac))


class EntropyDistribution:
    """Counting distribution of (mean) block entropy at fixed (T, n, N).

    Keys are stored in ascending entropy order (descending weight) with
    arbitrary-precision counts; the total mass is exactly lam**(c*N).
    """

    __slots__ = ("T", "n", "N", "lam", "c", "keys", "counts", "total",
                 "_cum", "_entropies", "_weights")

    def __init__(self, T: int, n: int, N: int, keys: Iterable[EntropyKey], counts: Iterable[int]):
        self.T = T
        self.n = n
        self.N = N
        self.lam = 4 ** n
        self.c = T // n
        order = sorted(zip(keys, counts), key=lambda kc: kc[0].weight, reverse=True)
        self.keys = tuple(k for k, _ in order)
        self.counts = tuple(int(v) for _, v in order)
        c_total = self.c * N
        for key in self.keys:
            if key.c != c_total:
                raise ValidationError(f"key has c={key.c}, distribution needs {c_total}")
        if len(set(k.weight for k in self.keys)) != len(self.keys):
            raise ValidationError("duplicate entropy keys")
        if any(v < 0 for v in self.counts):
            raise ValidationError("counts must be non-negative")
        self.total = sum(self.counts)
        if self.total != self.lam ** c_total:
            raise ValidationError(
                f"total {self.total} != {self.lam}^{c_total}; distribution is inconsistent"
            )
        cum = []
        acc = 0
        for v in self.counts:
            acc += v
            cum.append(acc)
        self._cum = tuple(cum)
        self._weights = tuple(k.weight for k in self.keys)
        self._entropies = tuple(self.entropy_of_key(k) for k in self.keys)

    def entropy_of_key(self, key: EntropyKey) -> float:
        """Mean block entropy of a key: log2(c) - log2(W) / (c*N)."""
        return math.log2(self.c) - math.log2(key.weight) / (self.c * self.N)

    @property
    def num_entropy_values(self) -> int:
        """Number of distinct achievable (mean) entropy values."""
        return len(self.keys)

    @property
    def min_entropy(self) -> float:
        return self._entropies[0]

    @property
    def max_entropy(self) -> float:
        return self._entropies[-1]

    def support(self) -> tuple[float, ...]:
        return self._entropies

    def items(self) -> Iterator[tuple[EntropyKey, int]]:
        return iter(zip(self.keys, self.counts))

    def cumulative_at_key(self, key: EntropyKey) -> int:
        """Total count of keys with entropy <= the given key's (exact)."""
        if key.c != self.c * self.N:
            raise ContextMismatchError(
                f"key c={key.c} does not match distribution c*N={self.c * self.N}"
            )
        # keys sorted descending by weight; entropy <= key's  <=>  weight >= key.weight
        lo, hi = 0, len(self._weights)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._weights[mid] >= key.weight:
                lo = mid + 1
            else:
                hi = mid
        return self._cum[lo - 1] if lo else 0

    def cumulative_at_float(self, s: float, tol: float = FLOAT_MATCH_TOL) -> int:
        """Total count of keys with entropy <= s, ties within tol included."""
        idx = bisect_right(self._entropies, s + tol)
        return self._cum[idx - 1] if idx else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntropyDistribution):
            return NotImplemented
        return (
            (self.T, self.n, self.N) == (other.T, other.n, other.N)
            and self.keys == other.keys
            and self.counts == other.counts
        )

    def __repr__(self) -> str:
        return (f"EntropyDistribution(T={self.T}, n={self.n}, N={self.N}, "
                f"values={self.num_entropy_values}, total={self.total})")


def build_distribution(T: int, n: int, *, max_partitions: int = DEFAULT_MAX_PARTITIONS) -> EntropyDistribution:
    """Exact entropy distribution over all lam**c padding-free blocks."""
    if n < 1 or T < n:
        raise ValidationError("need T >= n >= 1")
    c = T // n
    lam = 4 ** n
    max_parts = min(lam, c)
    npart = partition_count(c, max_parts)
    if npart > max_partitions:
        raise ResourceGuardError(
            f"(T={T}, n={n}) needs {npart} partitions of c={c} into <= {max_parts} parts, "
            f"over the cap of {max_partitions}; raise max_partitions to force this"
        )
    acc: dict[int, list] = {}
    for parts in enumerate_partitions(c, max_parts):
        words = count_words(parts, lam)
        weight = 1
        for p in parts:
            weight *= _self_power(p)
        slot = acc.get(weight)
        if slot is None:
            acc[weight] = [EntropyKey.from_counts(parts), words]
        else:
            slot[1] += words
    keys = [slot[0] for slot in acc.values()]
    counts = [slot[1] for slot in acc.values()]
    return EntropyDistribution(T, n, 1, keys, counts)


def convolve_mean(dist: EntropyDistribution, N: int, *, max_pairs: int = DEFAULT_MAX_PAIRS) -> EntropyDistribution:
    """Distribution of the mean entropy of N independent blocks.

    Counts multiply and accumulate over key products; two N-tuples of keys
    with equal summed exponent vectors merge into one support point.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if dist.N != 1:
        raise ValidationError("convolve_mean expects an N=1 distribution")
    if N == 1:
        return dist
    base = list(zip(dist.keys, dist.counts))
    acc = {k.weight: [k, v] for k, v in base}
    for _ in range(N - 1):
        if len(acc) * len(base) > max_pairs:
            raise ResourceGuardError(
                f"convolution support would need {len(acc) * len(base)} key pairs, "
                f"over the cap of {max_pairs}"
            )
        nxt: dict[int, list] = {}
        for k1, v1 in acc.values():
            for k2, v2 in base:
                w = k1.weight * k2.weight
                slot = nxt.get(w)
                if slot is None:
                    nxt[w] = [k1.combine(k2), v1 * v2]
                else:
                    slot[1] += v1 * v2
        acc = nxt
    keys = [slot[0] for slot in acc.values()]
    counts = [slot[1] for slot in acc.values()]
    return EntropyDistribution(dist.T, dist.n, N, keys, counts)


def rank_ratio(s_obs, dist: EntropyDistribution, *, tol: float = FLOAT_MATCH_TOL) -> RankRatio:
    """Fraction of all blocks with entropy <= the observed value.

    Accepts a float or an EntropyValue (whose (T, n) context, when present,
    must match the distribution). Equality against support points is decided
    within an absolute tolerance; exact-key lookups avoid even that (see
    rank_ratio_exact).
    """
    if isinstance(s_obs, EntropyValue):
        if s_obs.n != dist.n or (s_obs.T is not None and s_obs.T != dist.T):
            raise ContextMismatchError(
                f"observation context (T={s_obs.T}, n={s_obs.n}) does not match "
                f"distribution (T={dist.T}, n={dist.n})"
            )
        s = s_obs.value
    else:
        s = float(s_obs)
    return _make_ratio(dist.cumulative_at_float(s, tol), dist.total)


def rank_ratio_exact(key: EntropyKey, dist: EntropyDistribution) -> RankRatio:
    """Rank ratio via exact key comparison; no floating point involved."""
    return _make_ratio(dist.cumulative_at_key(key), dist.total)


_memo: dict[tuple[int, int, int], EntropyDistribution] = {}


def get_distribution(
    T: int,
    n: int,
    N: int = 1,
    *,
    cache_dir: str | None = None,
    max_partitions: int = DEFAULT_MAX_PARTITIONS,
) -> EntropyDistribution:
    """Fetch a distribution, preferring memory, then cache_dir, then building."""
    key = (T, n, N)
    path = cache_path(cache_dir, T, n, N) if cache_dir else None
    if key in _memo:
        dist = _memo[key]
        if path and not os.path.exists(path):
            save_distribution(dist, path)
        return dist
    if path and os.path.exists(path):
        dist = load_distribution(path)
    else:
        dist = convolve_mean(build_distribution(T, n, max_partitions=max_partitions), N)
        if path:
            save_distribution(dist, path)
    _memo[key] = dist
    return dist


def calculate_ratio(
    seq: EncodedSequence,
    T: int,
    n: int,
    *,
    n_blocks: int | None = 1,
    dist: EntropyDistribution | None = None,
    cache_dir: str | None = None,
    max_partitions: int = DEFAULT_MAX_PARTITIONS,
) -> RankRatio:
    """Rank ratio of a sequence's mean block entropy over its first blocks.

    n_blocks defaults to 1 (the entropy of the first T-block alone);
    n_blocks=None uses every full block. Padding-free blocks resolve by
    exact key; blocks whose n-gram count was reduced by padding fall back
    to the float comparison, since their entropy is still well-defined but
    their frequency shape is outside the reference population.
    """
    avail = len(seq) // T
    if avail < 1:
        raise ValidationError(f"sequence of length {len(seq)} has no full {T}-block")
    N = avail if n_blocks is None else n_blocks
    if N < 1 or N > avail:
        raise ValidationError(f"n_blocks must lie in 1..{avail}")
    if dist is None:
        dist = get_distribution(T, n, N, cache_dir=cache_dir, max_partitions=max_partitions)
    elif (dist.T, dist.n, dist.N) != (T, n, N):
        raise ContextMismatchError(
            f"distribution is for (T={dist.T}, n={dist.n}, N={dist.N}), "
            f"requested (T={T}, n={n}, N={N})"
        )
    M = T // n
    block_keys = []
    for b in range(N):
        _, counts = _kernels.nonzero_counts(seq.tokens[b * T : (b + 1) * T], n)
        if int(counts.sum()) != M:
            block_keys = None
            break
        block_keys.append(EntropyKey.from_counts(counts))
    if block_keys is not None:
        return rank_ratio_exact(reduce(EntropyKey.combine, block_keys), dist)
    ents = _kernels.block_entropies(seq.tokens[: N * T], T, n)
    if np.isnan(ents).any():
        raise ValidationError("a block contains no complete padding-free n-gram")
    return rank_ratio(float(ents.mean()), dist)


def calibration_check(dist: EntropyDistribution, t_grid: Iterable[float]) -> list[tuple[float, Fraction]]:
    """Exact P(R <= t) for each threshold, asserting super-uniformity."""
    out = []
    for t in t_grid:
        tf = t if isinstance(t, Fraction) else Fraction(float(t))
        threshold = tf * dist.total
        idx = bisect_right(dist._cum, threshold)
        p = Fraction(dist._cum[idx - 1], dist.total) if idx else Fraction(0)
        if p > tf:
            raise AssertionError(f"calibration violated at t={t}: P(R<=t)={p}")
        out.append((float(t), p))
    return out


def cache_path(cache_dir: str, T: int, n: int, N: int) -> str:
    return os.path.join(cache_dir, f"dist_T{T}_n{n}_N{N}.txt")


def save_distribution(dist: EntropyDistribution, path: str) -> None:
    """Write the versioned text format atomically (write then rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"{CACHE_HEADER}\n")
            fh.write(f"T={dist.T} n={dist.n} N={dist.N} lambda={dist.lam} c={dist.c}\n")
            for key, count, ent in zip(dist.keys, dist.counts, dist._entropies):
                fh.write(f"{ent:.17g} {key.canonical_string()} {count}\n")
            fh.write(f"total {dist.total}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_distribution(path: str) -> EntropyDistribution:
    """Parse a cache file; keys are exact, floats are cross-checked only."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != CACHE_HEADER:
        raise ValidationError(f"{path}: not an entrank distribution cache")
    meta = {}
    for item in lines[1].split():
        k, _, v = item.partition("=")
        meta[k] = int(v)
    T, n, N = meta["T"], meta["n"], meta["N"]
    c_total = (T // n) * N
    keys, counts = [], []
    total_line = None
    for ln in lines[2:]:
        if not ln:
            continue
        if ln.startswith("total "):
            total_line = int(ln.split()[1])
            continue
        ent_s, expvec, count_s = ln.split()
        key = EntropyKey.from_string(expvec, c_total)
        keys.append(key)
        counts.append(int(count_s))
        recomputed = math.log2(T // n) - math.log2(key.weight) / c_total
        if abs(float(ent_s) - recomputed) > 1e-9:
            raise ValidationError(f"{path}: entropy column disagrees with key {expvec}")
    dist = EntropyDistribution(T, n, N, keys, counts)
    if total_line is not None and total_line != dist.total:
        raise ValidationError(f"{path}: total line {total_line} != sum of counts {dist.total}")
    if meta.get("lambda") != dist.lam or meta.get("c") != dist.c:
        raise ValidationError(f"{path}: metadata inconsistent with (T, n)")
    return dist
