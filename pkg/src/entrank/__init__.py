"""Entropy rank ratio toolkit for nucleotide sequences.

Exact combinatorial block-entropy distributions, rank-ratio scoring,
Monte-Carlo entropy profiles, and complexity-guided cropping, with a batch
CLI (`entrank`). Hot counting kernels run compiled when the extension is
available; see entrank._kernels.BACKEND.
"""

from ._kernels import BACKEND
from .augment import (
    CROP_METHODS,
    CompressorCache,
    CropConfig,
    basic_crop,
    compress_subchunk,
    crop_sequence,
    entropy_crop,
    kolmogorov_crop,
    pad_or_sample,
    random_crop,
    ratio_crop,
)
from .entropy import (
    ConcatBound,
    EntropyValue,
    block_entropy,
    concat_bound,
    entropy_from_counts,
    mean_block_entropy,
    monte_carlo_profiles,
)
from .errors import (
    ContextMismatchError,
    EntrankError,
    ResourceGuardError,
    ValidationError,
)
from .partition import (
    EntropyDistribution,
    EntropyKey,
    RankRatio,
    build_distribution,
    calculate_ratio,
    calibration_check,
    convolve_mean,
    count_words,
    enumerate_partitions,
    get_distribution,
    load_distribution,
    partition_count,
    rank_ratio,
    rank_ratio_exact,
    save_distribution,
)
from .seqcore import (
    PAD,
    BlockSpec,
    EncodedSequence,
    FrequencyVector,
    encode,
    gc_content,
    random_sequence,
    split_blocks,
    tuple_counts,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockSpec",
    "CompressorCache",
    "ConcatBound",
    "ContextMismatchError",
    "CROP_METHODS",
    "CropConfig",
    "EncodedSequence",
    "EntrankError",
    "EntropyDistribution",
    "EntropyKey",
    "EntropyValue",
    "FrequencyVector",
    "PAD",
    "RankRatio",
    "ResourceGuardError",
    "ValidationError",
    "basic_crop",
    "block_entropy",
    "build_distribution",
    "calculate_ratio",
    "calibration_check",
    "compress_subchunk",
    "concat_bound",
    "convolve_mean",
    "count_words",
    "crop_sequence",
    "encode",
    "entropy_crop",
    "entropy_from_counts",
    "enumerate_partitions",
    "gc_content",
    "get_distribution",
    "kolmogorov_crop",
    "load_distribution",
    "mean_block_entropy",
    "monte_carlo_profiles",
    "pad_or_sample",
    "partition_count",
    "random_crop",
    "random_sequence",
    "rank_ratio",
    "rank_ratio_exact",
    "ratio_crop",
    "save_distribution",
    "split_blocks",
    "tuple_counts",
]
