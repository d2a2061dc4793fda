import math
import os
from fractions import Fraction

import numpy as np
import pytest

import entrank as er
from entrank import ContextMismatchError, ResourceGuardError, ValidationError
from entrank.partition import (
    EntropyKey,
    cache_path,
    load_distribution,
    save_distribution,
)

from conftest import (
    all_words,
    oracle_count_words,
    oracle_entropy_histogram,
    oracle_partitions,
    oracle_word_entropies,
)


# ---------------------------------------------------------------------------
# partition enumeration


def test_enumerate_partitions_examples():
    got = list(er.enumerate_partitions(4, 4))
    assert got == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert list(er.enumerate_partitions(0, 3)) == [()]
    assert list(er.enumerate_partitions(5, 2)) == [(5,), (4, 1), (3, 2)]


def test_enumerate_partitions_against_brute_force():
    for c in range(0, 9):
        for max_parts in (1, 2, 3, 4, 7):
            got = list(er.enumerate_partitions(c, max_parts))
            assert len(got) == len(set(got)), "duplicates"
            assert set(got) == oracle_partitions(c, max_parts)
            assert got == sorted(got, reverse=True), "lexicographically decreasing"
            assert er.partition_count(c, max_parts) == len(got)


def test_partition_shapes_valid():
    for parts in er.enumerate_partitions(10, 4):
        assert sum(parts) == 10
        assert len(parts) <= 4
        assert all(a >= b for a, b in zip(parts, parts[1:]))
        assert all(p > 0 for p in parts)


# ---------------------------------------------------------------------------
# word counting


def test_count_words_examples():
    assert er.count_words((3, 1), 4) == 48
    assert er.count_words((1, 1, 1, 1), 4) == 24
    for lam in (4, 16, 64):
        for c in (1, 3, 7):
            assert er.count_words((c,), lam) == lam


def test_count_words_brute_force():
    for c, lam in [(4, 4), (5, 4), (3, 4)]:
        for parts in er.enumerate_partitions(c, lam):
            assert er.count_words(parts, lam) == oracle_count_words(parts, lam)


def test_count_words_validation():
    with pytest.raises(ValidationError):
        er.count_words((1, 2), 4)  # increasing
    with pytest.raises(ValidationError):
        er.count_words((1, 1, 1), 2)  # too many parts
    with pytest.raises(ValidationError):
        er.count_words((2, 0), 4)  # zero part


def test_count_words_sanity_sum():
    for lam in (4, 16, 64):
        for c in range(0, 13):
            total = sum(
                er.count_words(p, lam) for p in er.enumerate_partitions(c, min(c, lam) or 1)
            )
            assert total == lam ** c


# ---------------------------------------------------------------------------
# entropy keys


def test_entropy_key_examples():
    k = EntropyKey.from_counts([3, 1])
    assert k.weight == 27
    assert k.canonical_string() == "3^3"
    assert EntropyKey.from_string("3^3", 4) == k
    assert EntropyKey.from_counts([4]).weight == 256
    assert EntropyKey.from_counts([1, 1, 1, 1]).weight == 1
    assert EntropyKey.from_counts([1, 1, 1, 1]).canonical_string() == "1"


def test_entropy_key_merges_distinct_partitions():
    # (2,2,2,2) and (4,1,1,1,1) both have entropy 2 at c=8
    a = EntropyKey.from_counts([2, 2, 2, 2])
    b = EntropyKey.from_counts([4, 1, 1, 1, 1])
    assert a == b
    assert a.weight == 256


def test_entropy_key_combine():
    a = EntropyKey.from_counts([3, 1])
    b = EntropyKey.from_counts([2, 2])
    ab = a.combine(b)
    assert ab.c == 8
    assert ab.weight == 27 * 16
    assert ab == b.combine(a)


def test_entropy_key_zero_counts_ignored():
    assert EntropyKey.from_counts([3, 0, 1, 0]) == EntropyKey.from_counts([3, 1])


def test_entropy_key_soundness_exhaustive():
    # equal keys <=> float entropies equal; distinct keys separated
    for c in range(1, 31):
        by_key: dict[int, list[float]] = {}
        for parts in er.enumerate_partitions(c, min(c, 16)):
            s = -sum((p / c) * math.log2(p / c) for p in parts)
            by_key.setdefault(EntropyKey.from_counts(parts).weight, []).append(s)
        reps = []
        for values in by_key.values():
            assert max(values) - min(values) <= 1e-12
            reps.append(values[0])
        reps.sort()
        for a, b in zip(reps, reps[1:]):
            assert b - a > 1e-12


# ---------------------------------------------------------------------------
# distribution building


def test_build_distribution_t4_frozen_histogram(dist_t4):
    got = {round(dist_t4.entropy_of_key(k), 6): c for k, c in dist_t4.items()}
    assert got == {0.0: 4, 0.811278: 48, 1.0: 36, 1.5: 144, 2.0: 24}
    assert dist_t4.total == 256
    assert dist_t4.num_entropy_values == 5


def test_build_distribution_t5_n2():
    dist = er.build_distribution(5, 2)
    assert dist.c == 2 and dist.lam == 16
    got = {round(dist.entropy_of_key(k), 6): c for k, c in dist.items()}
    assert got == {0.0: 16, 1.0: 240}
    assert dist.total == 256


def test_build_distribution_brute_force_small():
    for T, n in [(1, 1), (3, 1), (6, 1), (4, 2), (6, 2), (6, 3)]:
        dist = er.build_distribution(T, n)
        oracle = oracle_entropy_histogram(T, n)
        assert dist.num_entropy_values == len(oracle)
        for (key, count), (s_oracle, c_oracle) in zip(dist.items(), oracle):
            assert count == c_oracle
            assert dist.entropy_of_key(key) == pytest.approx(s_oracle, abs=1e-9)


def test_build_distribution_t20_total():
    dist = er.build_distribution(20, 1)
    assert dist.total == 4 ** 20 == 1099511627776
    assert dist.min_entropy == 0.0
    assert dist.max_entropy == pytest.approx(2.0, abs=1e-12)


def test_build_distribution_resource_guard():
    with pytest.raises(ResourceGuardError, match="partitions"):
        er.build_distribution(400, 1, max_partitions=1000)


def test_distribution_support_sorted(dist_t8):
    sup = dist_t8.support()
    assert all(a < b for a, b in zip(sup, sup[1:]))
    assert sum(dist_t8.counts) == dist_t8.total == 4 ** 8


# ---------------------------------------------------------------------------
# convolution


def test_convolve_identity(dist_t4):
    assert er.convolve_mean(dist_t4, 1) is dist_t4


def test_convolve_n2_against_pair_oracle(dist_t4):
    d2 = er.convolve_mean(dist_t4, 2)
    assert d2.total == 256 ** 2
    # independent double loop over the 5x5 single-block support
    singles = [(dist_t4.entropy_of_key(k), c) for k, c in dist_t4.items()]
    pair_hist: dict[float, int] = {}
    for s1, c1 in singles:
        for s2, c2 in singles:
            key = round((s1 + s2) / 2, 9)
            pair_hist[key] = pair_hist.get(key, 0) + c1 * c2
    got = {round(d2.entropy_of_key(k), 9): c for k, c in d2.items()}
    assert got == pair_hist
    assert got[0.0] == 16
    assert got[1.0] == 1488  # (0,2)+(2,0)+(1,1) merged into one exact key


def test_convolve_n2_against_word_brute_force(dist_t4):
    # every 8-letter word split 4+4: mean of the two block entropies
    d2 = er.convolve_mean(dist_t4, 2)
    ents4 = oracle_word_entropies(all_words(4), 1)
    means = np.sort((ents4[:, None] + ents4[None, :]).ravel() / 2)
    # cluster and compare
    clusters = []
    start = 0
    for i in range(1, len(means) + 1):
        if i == len(means) or means[i] - means[i - 1] > 1e-9:
            clusters.append((float(means[start:i].mean()), i - start))
            start = i
    assert d2.num_entropy_values == len(clusters)
    for (key, count), (s_oracle, c_oracle) in zip(d2.items(), clusters):
        assert count == c_oracle
        assert d2.entropy_of_key(key) == pytest.approx(s_oracle, abs=1e-9)


def test_convolve_n3_total(dist_t4):
    d3 = er.convolve_mean(dist_t4, 3)
    assert d3.total == 256 ** 3
    assert d3.N == 3


def test_convolve_guard(dist_t22):
    with pytest.raises(ResourceGuardError):
        er.convolve_mean(dist_t22, 4, max_pairs=100)


def test_convolve_requires_base_distribution(dist_t4):
    d2 = er.convolve_mean(dist_t4, 2)
    with pytest.raises(ValidationError):
        er.convolve_mean(d2, 2)


# ---------------------------------------------------------------------------
# rank ratio


def test_rank_ratio_paper_examples(dist_t4):
    r = er.calculate_ratio(er.encode("AAAG"), 4, 1, dist=dist_t4)
    assert r.fraction == Fraction(52, 256)
    assert r.value == 0.203125
    r = er.calculate_ratio(er.encode("GGTT"), 4, 1, dist=dist_t4)
    assert r.fraction == Fraction(88, 256)
    assert r.value == 0.34375
    r = er.calculate_ratio(er.encode("AAAA"), 4, 1, dist=dist_t4)
    assert r.fraction == Fraction(4, 256)


def test_rank_ratio_brute_force(dist_t4):
    # fraction of all 256 words at or below each word's entropy
    ents = oracle_word_entropies(all_words(4), 1)
    for word, s in [("AAAG", 0.8112781244591329), ("GGTT", 1.0), ("ACGT", 2.0)]:
        expected = int((ents <= s + 1e-9).sum())
        got = er.calculate_ratio(er.encode(word), 4, 1, dist=dist_t4)
        assert got.fraction == Fraction(expected, 256)


def test_rank_ratio_max_entropy_is_one(dist_t4, dist_t8):
    assert er.calculate_ratio(er.encode("ACGT"), 4, 1, dist=dist_t4).fraction == 1
    assert er.calculate_ratio(er.encode("AACCGGTT"), 8, 1, dist=dist_t8).fraction == 1


def test_rank_ratio_float_and_exact_paths_agree(dist_t8, rng):
    for _ in range(50):
        seq = er.random_sequence(8, rng)
        s = er.block_entropy(er.tuple_counts(seq, 1)).value
        exact = er.calculate_ratio(seq, 8, 1, dist=dist_t8)
        via_float = er.rank_ratio(s, dist_t8)
        assert exact.fraction == via_float.fraction


def test_rank_ratio_non_decreasing(dist_t22):
    sup = dist_t22.support()
    rs = [er.rank_ratio(s, dist_t22).fraction for s in sup]
    assert all(a < b for a, b in zip(rs, rs[1:]))
    assert rs[-1] == 1


def test_rank_ratio_context_checks(dist_t4):
    with pytest.raises(ContextMismatchError):
        er.rank_ratio(er.EntropyValue(1.0, n=2, T=4), dist_t4)
    with pytest.raises(ContextMismatchError):
        er.rank_ratio(er.EntropyValue(1.0, n=1, T=5), dist_t4)
    ok = er.rank_ratio(er.EntropyValue(1.0, n=1, T=4), dist_t4)
    assert ok.fraction == Fraction(88, 256)
    with pytest.raises(ContextMismatchError):
        er.calculate_ratio(er.encode("AAAGAAAG"), 8, 1, dist=dist_t4)


def test_calculate_ratio_multi_block(dist_t4):
    d2 = er.convolve_mean(dist_t4, 2)
    seq = er.encode("AAAAACGT")  # blocks with S=0 and S=2 -> mean 1
    r = er.calculate_ratio(seq, 4, 1, n_blocks=2, dist=d2)
    assert r.fraction == er.rank_ratio(1.0, d2).fraction
    # n_blocks=None uses all available blocks
    r_all = er.calculate_ratio(seq, 4, 1, n_blocks=None, dist=d2)
    assert r_all == r


def test_calculate_ratio_short_sequence_errors(dist_t4):
    with pytest.raises(ValidationError):
        er.calculate_ratio(er.encode("ACG"), 4, 1, dist=dist_t4)


def test_calculate_ratio_padding_falls_back_to_float(dist_t4):
    seq = er.EncodedSequence(np.array([0, 0, 0, 4], dtype=np.uint8))
    # S over {3 tokens of A} = 0; same rank as the all-A exact key
    r = er.calculate_ratio(seq, 4, 1, dist=dist_t4)
    assert r.fraction == Fraction(4, 256)


def test_rank_ratio_in_unit_interval(dist_t22, rng):
    for _ in range(25):
        seq = er.random_sequence(22, rng)
        r = er.calculate_ratio(seq, 22, 1, dist=dist_t22)
        assert 0 < r.fraction <= 1


# ---------------------------------------------------------------------------
# calibration


def test_calibration_walk_examples(dist_t4):
    out = dict((t, p) for t, p in er.calibration_check(dist_t4, [0.0, 0.2, 1.0]))
    assert out[0.0] == 0
    assert out[0.2] == Fraction(4, 256)  # only the zero-entropy key fits under 0.2
    assert out[1.0] == 1


def test_calibration_super_uniform_grids(dist_t4, dist_t8, dist_t22):
    grid = [i / 1000 for i in range(1001)]
    for dist in (dist_t4, dist_t8, dist_t22, er.convolve_mean(dist_t4, 2)):
        for t, p in er.calibration_check(dist, grid):
            assert p <= Fraction(t)  # exact comparison, no rounding


# ---------------------------------------------------------------------------
# cache


def test_cache_roundtrip(tmp_path, dist_t8):
    path = cache_path(str(tmp_path), 8, 1, 1)
    save_distribution(dist_t8, path)
    loaded = load_distribution(path)
    assert loaded == dist_t8
    assert loaded.total == dist_t8.total


def test_cache_roundtrip_convolved(tmp_path, dist_t4):
    d2 = er.convolve_mean(dist_t4, 2)
    path = cache_path(str(tmp_path), 4, 1, 2)
    save_distribution(d2, path)
    assert load_distribution(path) == d2


def test_cache_file_format(tmp_path, dist_t4):
    path = cache_path(str(tmp_path), 4, 1, 1)
    save_distribution(dist_t4, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "entrank-dist v1"
    assert lines[1] == "T=4 n=1 N=1 lambda=4 c=4"
    assert lines[2].split() == ["0", "2^8", "4"]
    assert lines[-1] == "total 256"


def test_cache_rejects_tampering(tmp_path, dist_t4):
    path = cache_path(str(tmp_path), 4, 1, 1)
    save_distribution(dist_t4, path)
    text = open(path).read()
    with open(path, "w") as fh:
        fh.write(text.replace("total 256", "total 255"))
    with pytest.raises(ValidationError):
        load_distribution(path)
    with open(path, "w") as fh:
        fh.write("bogus\n")
    with pytest.raises(ValidationError):
        load_distribution(path)


def test_get_distribution_uses_cache_dir(tmp_path):
    d1 = er.get_distribution(6, 1, cache_dir=str(tmp_path))
    assert os.path.exists(cache_path(str(tmp_path), 6, 1, 1))
    d2 = er.get_distribution(6, 1, cache_dir=str(tmp_path))
    assert d1 == d2
