"""Sequence encoding, n-gram grouping, block splitting, GC content.

Nucleotides map to integer tokens A,C,G,T -> 0,1,2,3 with 4 reserved for
padding. All operations are pure; EncodedSequence wraps a read-only array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError

PAD = 4
BASES = "ACGT"
PAD_CHAR = "."

_ENCODE_LUT = np.full(256, 255, dtype=np.uint8)
for _i, _b in enumerate(BASES):
    _ENCODE_LUT[ord(_b)] = _i
    _ENCODE_LUT[ord(_b.lower())] = _i

_DECODE_LUT = {0: "A", 1: "C", 2: "G", 3: "T", PAD: PAD_CHAR}


@dataclass(frozen=True, eq=False)
class EncodedSequence:
    """Integer-token sequence over {0..4}; tokens are immutable."""

    tokens: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.tokens, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValidationError("tokens must be one-dimensional")
        if arr.size and arr.max() > PAD:
            raise ValidationError("tokens must lie in {0,1,2,3,4}")
        arr.flags.writeable = False
        object.__setattr__(self, "tokens", arr)

    def __len__(self) -> int:
        return self.tokens.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedSequence):
            return NotImplemented
        return np.array_equal(self.tokens, other.tokens)

    def window(self, start: int, length: int) -> "EncodedSequence":
        if start < 0 or start + length > len(self):
            raise ValidationError("window out of range")
        return EncodedSequence(self.tokens[start : start + length].copy())

    def decode(self) -> str:
        return "".join(_DECODE_LUT[t] for t in self.tokens)


@dataclass(frozen=True)
class BlockSpec:
    """Block length T, tuple size n, optional block count N (None = all)."""

    T: int
    n: int = 1
    N: int | None = None

    def __post_init__(self):
        if self.T < 1 or self.n < 1:
            raise ValidationError("T and n must be >= 1")
        if self.n > self.T:
            raise ValidationError("n must not exceed T")
        if self.N is not None and self.N < 1:
            raise ValidationError("N must be >= 1")

    @property
    def tuples_per_block(self) -> int:
        """M = floor(T/n), the tuple count c of a padding-free block."""
        return self.T // self.n

    @property
    def alphabet_size(self) -> int:
        """Effective alphabet size 4**n."""
        return 4 ** self.n


@dataclass(frozen=True)
class FrequencyVector:
    """Occurrence counts of n-gram identities, stored sparsely.

    ids are big-endian base-4 values of the n tokens; counts align with
    ids. Conceptually the vector has length 4**n with zeros elsewhere.
    """

    n: int
    ids: tuple = ()
    counts: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        arr = np.ascontiguousarray(self.counts, dtype=np.int64)
        if arr.ndim != 1 or arr.size != len(self.ids):
            raise ValidationError("ids and counts must align")
        if arr.size and arr.min() < 1:
            raise ValidationError("stored counts must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))

    @property
    def c(self) -> int:
        """Total number of counted n-grams."""
        return int(self.counts.sum())

    @property
    def alphabet_size(self) -> int:
        return 4 ** self.n

    def dense(self) -> np.ndarray:
        """Full-length count vector; only sensible for small n."""
        lam = self.alphabet_size
        if lam > 2 ** 26:
            raise ValidationError("alphabet too large for a dense vector")
        out = np.zeros(lam, dtype=np.int64)
        for ident, cnt in zip(self.ids, self.counts):
            out[ident] = cnt
        return out


def encode(text: str, allow_padding: bool = False) -> EncodedSequence:
    """Encode an A/C/G/T string (case-insensitive) to tokens.

    Any other character is rejected with its position; allow_padding adds
    '.' -> 4 for re-reading augmented output files.
    """
    try:
        raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError as exc:
        raise ValidationError(f"non-ASCII character at position {exc.start}") from None
    lut = _ENCODE_LUT
    if allow_padding:
        lut = lut.copy()
        lut[ord(PAD_CHAR)] = PAD
    tokens = lut[raw]
    bad = np.nonzero(tokens == 255)[0]
    if bad.size:
        pos = int(bad[0])
        raise ValidationError(
            f"invalid character {text[pos]!r} at position {pos}: expected A, C, G or T"
        )
    return EncodedSequence(tokens)


def tuple_counts(seq: EncodedSequence, n: int) -> FrequencyVector:
    """Count non-overlapping n-grams; padding-bearing n-grams are skipped.

    The trailing len(seq) mod n tokens are ignored, so for a padding-free
    sequence the total count equals floor(L/n).
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    ids, counts = _kernels.nonzero_counts(seq.tokens, n)
    return FrequencyVector(n=n, ids=tuple(ids), counts=counts)


def split_blocks(seq: EncodedSequence, T: int) -> list[EncodedSequence]:
    """Split into floor(L/T) consecutive T-blocks, dropping the remainder."""
    if T < 1:
        raise ValidationError("T must be >= 1")
    nb = len(seq) // T
    return [EncodedSequence(seq.tokens[b * T : (b + 1) * T].copy()) for b in range(nb)]


def gc_content(seq: EncodedSequence) -> float:
    """Fraction of C/G among non-padding tokens."""
    tokens = seq.tokens
    valid = int((tokens != PAD).sum())
    if valid == 0:
        raise ValidationError("no non-padding tokens to measure GC content on")
    gc = int(((tokens == 1) | (tokens == 2)).sum())
    return gc / valid


def random_sequence(length: int, rng: np.random.Generator) -> EncodedSequence:
    """Uniform i.i.d. sequence over the four bases."""
    return EncodedSequence(rng.integers(0, 4, size=length, dtype=np.uint8))
