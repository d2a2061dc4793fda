"""Block Shannon entropy, mean block entropy, concatenation bound, profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

import numpy as np

from . import _kernels
from .errors import ValidationError
from .seqcore import BlockSpec, EncodedSequence, FrequencyVector, random_sequence


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in bits plus the (T, n) context it was computed under.

    T is None when the value does not belong to a specific block length
    (e.g. a bare frequency vector).
    """

    value: float
    n: int
    T: int | None = None

    def __float__(self) -> float:
        return self.value


def entropy_from_counts(counts: Iterable[int]) -> float:
    """log2(c) - (1/c) * sum(a * log2 a) over positive counts a."""
    counts = [int(a) for a in counts if a]
    c = sum(counts)
    if c == 0:
        raise ValidationError("cannot compute entropy of an empty frequency vector")
    return math.log2(c) - sum(a * math.log2(a) for a in counts) / c


def block_entropy(fv: FrequencyVector) -> EntropyValue:
    """Shannon entropy of the relative frequencies; zero counts contribute 0."""
    return EntropyValue(entropy_from_counts(fv.counts), n=fv.n)


def mean_block_entropy(seq: EncodedSequence, spec: BlockSpec) -> EntropyValue:
    """Arithmetic mean of block entropy over the first N full T-blocks.

    With spec.N = None all floor(L/T) blocks are used; the trailing
    remainder is always discarded.
    """
    avail = len(seq) // spec.T
    if avail < 1:
        raise ValidationError(f"sequence of length {len(seq)} has no full {spec.T}-block")
    nb = avail if spec.N is None else spec.N
    if nb > avail:
        raise ValidationError(f"requested {nb} blocks but only {avail} available")
    ents = _kernels.block_entropies(seq.tokens[: nb * spec.T], spec.T, spec.n)
    if np.isnan(ents).any():
        raise ValidationError("a block contains no complete padding-free n-gram")
    return EntropyValue(float(ents.mean()), n=spec.n, T=spec.T)


@dataclass(frozen=True)
class ConcatBound:
    """Mean entropy of a concatenation, the length-weighted proxy, and the
    remainder bound |theta - s_w| <= bound. Exact rational counterparts are
    kept alongside the float renderings so the inequality can be checked
    without rounding."""

    s_w: float
    theta: float
    bound: float
    s_w_exact: Fraction
    theta_exact: Fraction
    bound_exact: Fraction


def concat_bound(L_o: int, S_o: float, L_v: int, S_v: float, T: int, n: int) -> ConcatBound:
    """Combine the mean block entropies of two sequences o and v.

    s_w is the block-count weighted mean (exact for the concatenation when
    both lengths are multiples of T), theta the length-weighted mean, and
    bound = log2(4**n) * (r_o + r_v) / (T * N) with r the remainders.
    """
    if T < 1 or n < 1 or n > T:
        raise ValidationError("need T >= n >= 1")
    if L_o < T or L_v < T:
        raise ValidationError("both lengths must contain at least one full block")
    log_lam = 2 * n
    for name, s in (("S_o", S_o), ("S_v", S_v)):
        if not 0 <= s <= log_lam:
            raise ValidationError(f"{name} outside [0, {log_lam}]")
    n_o, r_o = divmod(L_o, T)
    n_v, r_v = divmod(L_v, T)
    nb = n_o + n_v
    so, sv = Fraction(S_o), Fraction(S_v)
    s_w = (n_o * so + n_v * sv) / nb
    theta = (L_o * so + L_v * sv) / (L_o + L_v)
    bound = Fraction(log_lam * (r_o + r_v), T * nb)
    return ConcatBound(float(s_w), float(theta), float(bound), s_w, theta, bound)


def monte_carlo_profiles(
    L: int,
    num_sequences: int,
    sweep: str,
    *,
    n: int = 1,
    n_max: int = 50,
    seed: int | None = None,
) -> list[tuple[int, float]]:
    """Mean entropy profiles over uniform-random sequences of length L.

    sweep="N": points N = 1..L with T = floor(L/N) and n fixed; the mean
    block entropy uses every full T-block. Points where a block cannot hold
    one n-gram (T < n) report 0.
    sweep="n": no blocking (N=1, T=L), n = 1..n_max.

    Each sequence draws from an independent stream derived from the seed,
    so results are reproducible and independent of evaluation order.
    """
    if L < 1 or num_sequences < 1:
        raise ValidationError("L and num_sequences must be >= 1")
    if sweep not in ("N", "n"):
        raise ValidationError("sweep must be 'N' or 'n'")
    if sweep == "n" and not 1 <= n_max <= L:
        raise ValidationError("n_max must lie in 1..L")
    if sweep == "N" and not 1 <= n <= L:
        raise ValidationError("n must lie in 1..L")

    streams = np.random.SeedSequence(seed).spawn(num_sequences)
    seqs = [random_sequence(L, np.random.default_rng(s)) for s in streams]

    rows: list[tuple[int, float]] = []
    if sweep == "n":
        for nn in range(1, n_max + 1):
            vals = [_kernels.ngram_entropy(s.tokens, nn) for s in seqs]
            rows.append((nn, float(np.nan_to_num(np.array(vals)).mean())))
        return rows

    # N-sweep: many N share the same T = floor(L/N); compute once per T
    per_t: dict[int, float] = {}
    for nb in range(1, L + 1):
        T = L // nb
        if T not in per_t:
            if T // n == 0:
                per_t[T] = 0.0
            else:
                per_t[T] = float(
                    np.mean([_kernels.block_entropies(s.tokens, T, n).mean() for s in seqs])
                )
        rows.append((nb, per_t[T]))
    return rows


def write_profile_csv(rows: list[tuple[int, float]], out: TextIO, full_precision: bool = False) -> None:
    """Emit `param,mean_entropy` rows with fixed 6-decimal formatting."""
    out.write("param,mean_entropy\n")
    fmt = "{:.17g}" if full_precision else "{:.6f}"
    for param, mean in rows:
        out.write(f"{param},{fmt.format(mean)}\n")
