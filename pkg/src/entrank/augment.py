"""Fixed-length cropping strategies for sequence augmentation.

Five strategies share one geometry: a window of target_len tokens whose
start is the sequence center plus a random offset bounded by
floor((L - target_len) * offset_ratio), clamped into range. They differ in
how a window is chosen among candidates: uniformly (random), by closeness
of window entropy to the whole-sequence entropy, by closeness of the
window's rank ratio to the whole sequence's, or by extremal compressed
length (the complexity proxy). The basic crop is the deterministic center
window and serves as the no-augmentation reference.
"""

from __future__ import annotations

import math
import threading
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError
from .partition import EntropyDistribution, calculate_ratio, get_distribution
from .seqcore import PAD, EncodedSequence

CROP_METHODS = ("basic", "random", "entropy", "kolmogorov", "ratio")

DEFAULT_CACHE_MAX_SIZE = 65536


@dataclass(frozen=True)
class CropConfig:
    """Shared knobs for the candidate-scoring crops.

    alpha weighs the complexity-difference term, beta the normalized
    distance of the offset from center; pick selects the extremum for the
    compression-based crop. T and n configure ratio/entropy scoring.
    """

    target_len: int
    num_candidates: int = 8
    offset_ratio: float = 1.0
    alpha: float = 1.0
    beta: float = 0.0
    pick: str = "max"
    T: int | None = None
    n: int = 1
    seed: int | None = None

    def __post_init__(self):
        if self.target_len < 1:
            raise ValidationError("target_len must be >= 1")
        if self.num_candidates < 1:
            raise ValidationError("num_candidates must be >= 1")
        if not 0.0 <= self.offset_ratio <= 1.0:
            raise ValidationError("offset_ratio must lie in [0, 1]")
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("alpha and beta must be non-negative")
        if self.pick not in ("max", "min"):
            raise ValidationError("pick must be 'max' or 'min'")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.T is not None and self.T < self.n:
            raise ValidationError("T must be >= n")


class CompressorCache:
    """Bounded memo of packed-buffer -> compressed length.

    Insert-if-room only (no eviction); safe for concurrent use.
    """

    def __init__(self, max_size: int = DEFAULT_CACHE_MAX_SIZE):
        if max_size < 0:
            raise ValidationError("max_size must be >= 0")
        self.max_size = max_size
        self._data: dict[bytes, int] = {}
        self._lock = threading.Lock()

    def lookup(self, buf: bytes) -> int | None:
        with self._lock:
            return self._data.get(buf)

    def insert(self, buf: bytes, length: int) -> None:
        with self._lock:
            if len(self._data) < self.max_size and buf not in self._data:
                self._data[buf] = length

    def __len__(self) -> int:
        return len(self._data)


def _rng_for(cfg: CropConfig, rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(cfg.seed)


def _max_offset(length: int, target_len: int, offset_ratio: float) -> int:
    return int(math.floor((length - target_len) * offset_ratio))


def _candidate_starts(
    length: int, cfg: CropConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int]:
    """Random offsets, their clamped window starts, and max_offset."""
    center = (length - cfg.target_len) // 2
    max_off = _max_offset(length, cfg.target_len, cfg.offset_ratio)
    offsets = rng.integers(-max_off, max_off + 1, size=cfg.num_candidates)
    starts = np.clip(center + offsets, 0, length - cfg.target_len).astype(np.int64)
    return offsets, starts, max_off


def pad_or_sample(seq: EncodedSequence, target_len: int) -> EncodedSequence:
    """Right-pad with the padding token up to target_len; never truncates."""
    if len(seq) > target_len:
        raise ValidationError("sequence longer than target_len; crop before padding")
    if len(seq) == target_len:
        return seq
    pad = np.full(target_len - len(seq), PAD, dtype=np.uint8)
    return EncodedSequence(np.concatenate([seq.tokens, pad]))


def basic_crop(seq: EncodedSequence, target_len: int) -> EncodedSequence:
    """Deterministic center crop (the no-augmentation reference)."""
    L = len(seq)
    if L <= target_len:
        return pad_or_sample(seq, target_len)
    start = (L - target_len) // 2
    return seq.window(start, target_len)


def random_crop(seq: EncodedSequence, cfg: CropConfig, rng: np.random.Generator | None = None) -> EncodedSequence:
    """Window at a random clamped offset around the center."""
    L = len(seq)
    if L <= cfg.target_len:
        return pad_or_sample(seq, cfg.target_len)
    rng = _rng_for(cfg, rng)
    center = (L - cfg.target_len) // 2
    max_off = _max_offset(L, cfg.target_len, cfg.offset_ratio)
    offset = int(rng.integers(-max_off, max_off + 1))
    start = min(max(center + offset, 0), L - cfg.target_len)
    return seq.window(start, cfg.target_len)


def entropy_crop(
    seq: EncodedSequence,
    cfg: CropConfig,
    full_entropy: float,
    rng: np.random.Generator | None = None,
) -> EncodedSequence:
    """Candidate window whose n-gram entropy best matches full_entropy.

    Scores are alpha * |S_window - full_entropy| + beta * |offset| /
    max_offset (0 when max_offset is 0); the lowest-index minimum wins.
    A sequence no longer than target_len is returned unchanged.
    """
    L = len(seq)
    if L <= cfg.target_len:
        return seq
    if cfg.target_len < cfg.n:
        raise ValidationError("target_len must hold at least one n-gram")
    rng = _rng_for(cfg, rng)
    offsets, starts, max_off = _candidate_starts(L, cfg, rng)
    ents = _kernels.window_entropies(seq.tokens, starts, cfg.target_len, cfg.n)
    scores = cfg.alpha * np.abs(ents - float(full_entropy))
    if max_off > 0:
        scores = scores + cfg.beta * (np.abs(offsets) / max_off)
    best = int(np.argmin(scores))
    return seq.window(int(starts[best]), cfg.target_len)


def ratio_crop(
    seq: EncodedSequence,
    cfg: CropConfig,
    ratio_whole_seq,
    dist: EntropyDistribution,
    rng: np.random.Generator | None = None,
) -> EncodedSequence:
    """Candidate window whose rank ratio best matches the whole sequence's.

    Windows are scored with the same (T, n) single-block ratio used for
    ratio_whole_seq; scoring and tie-breaking mirror entropy_crop.
    """
    if cfg.T is None:
        raise ValidationError("ratio crop needs cfg.T")
    if cfg.target_len < cfg.T:
        raise ValidationError("target_len must be >= T so windows hold a full block")
    L = len(seq)
    if L <= cfg.target_len:
        return pad_or_sample(seq, cfg.target_len)
    rng = _rng_for(cfg, rng)
    offsets, starts, max_off = _candidate_starts(L, cfg, rng)
    target = float(ratio_whole_seq)
    best_idx = 0
    best_score = math.inf
    for i in range(cfg.num_candidates):
        window = EncodedSequence(seq.tokens[starts[i] : starts[i] + cfg.target_len].copy())
        cand = float(calculate_ratio(window, cfg.T, cfg.n, dist=dist))
        score = cfg.alpha * abs(cand - target)
        if max_off > 0:
            score += cfg.beta * (abs(int(offsets[i])) / max_off)
        if score < best_score:
            best_score = score
            best_idx = i
    return seq.window(int(starts[best_idx]), cfg.target_len)


def compress_subchunk(chunk, cache: CompressorCache | None = None) -> tuple[int, object]:
    """Compressed byte length of the packed tokens (one byte per token).

    Uses the zlib compressor at its fastest level; an empty chunk costs 0.
    Results are memoized in the cache when one is supplied.
    """
    tokens = chunk.tokens if isinstance(chunk, EncodedSequence) else np.ascontiguousarray(chunk, dtype=np.uint8)
    if tokens.size == 0:
        return 0, chunk
    buf = tokens.tobytes()
    if cache is not None:
        hit = cache.lookup(buf)
        if hit is not None:
            return hit, chunk
    length = len(zlib.compress(buf, 1))
    if cache is not None:
        cache.insert(buf, length)
    return length, chunk


def kolmogorov_crop(
    seq: EncodedSequence,
    cfg: CropConfig,
    rng: np.random.Generator | None = None,
    cache: CompressorCache | None = None,
    max_workers: int | None = None,
) -> EncodedSequence:
    """Candidate window with extremal compressed length.

    pick='max' keeps the most complex window, 'min' the least. Candidates
    may be compressed in a thread pool; results are consumed in submission
    order either way, so the parallel mode matches the sequential one.
    A sequence no longer than target_len is returned unchanged.
    """
    L = len(seq)
    if L <= cfg.target_len:
        return seq
    rng = _rng_for(cfg, rng)
    _, starts, _ = _candidate_starts(L, cfg, rng)
    chunks = [seq.tokens[s : s + cfg.target_len] for s in starts]

    def job(chunk):
        return compress_subchunk(chunk, cache)

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            lengths = [comp_len for comp_len, _ in ex.map(job, chunks)]
    else:
        lengths = [job(chunk)[0] for chunk in chunks]

    best_idx = 0
    best_val = -math.inf if cfg.pick == "max" else math.inf
    for i, comp_len in enumerate(lengths):
        if (cfg.pick == "max" and comp_len > best_val) or (cfg.pick != "max" and comp_len < best_val):
            best_val = comp_len
            best_idx = i
    return seq.window(int(starts[best_idx]), cfg.target_len)


def crop_sequence(
    seq: EncodedSequence,
    method: str,
    cfg: CropConfig,
    *,
    dist: EntropyDistribution | None = None,
    cache: CompressorCache | None = None,
    rng: np.random.Generator | None = None,
    cache_dir: str | None = None,
) -> EncodedSequence:
    """Apply one crop method and pad the result to exactly target_len.

    The ratio method builds (or loads) the (cfg.T, cfg.n) distribution when
    one is not passed in; a resource-guard refusal propagates.
    """
    if method not in CROP_METHODS:
        raise ValidationError(f"unknown crop method {method!r}; choose from {CROP_METHODS}")
    rng = _rng_for(cfg, rng)
    if method == "basic":
        out = basic_crop(seq, cfg.target_len)
    elif method == "random":
        out = random_crop(seq, cfg, rng)
    elif method == "entropy":
        if len(seq) > cfg.target_len:
            full = _kernels.ngram_entropy(seq.tokens, cfg.n)
            out = entropy_crop(seq, cfg, full, rng)
        else:
            out = seq
    elif method == "kolmogorov":
        out = kolmogorov_crop(seq, cfg, rng=rng, cache=cache)
    else:
        if len(seq) > cfg.target_len:
            if cfg.T is None:
                raise ValidationError("ratio crop needs cfg.T")
            if dist is None:
                dist = get_distribution(cfg.T, cfg.n, 1, cache_dir=cache_dir)
            whole = calculate_ratio(seq, cfg.T, cfg.n, dist=dist)
            out = ratio_crop(seq, cfg, whole, dist, rng)
        else:
            out = seq
    if len(out) < cfg.target_len:
        out = pad_or_sample(out, cfg.target_len)
    return out
