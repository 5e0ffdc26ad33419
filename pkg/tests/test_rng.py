import numpy as np
from scipy import stats

from qdimer import rng


def test_streams_are_pure_functions():
    a = rng.uniform_stream(123, 7, 64)
    b = rng.uniform_stream(123, 7, 64)
    assert np.array_equal(a, b)


def test_streams_differ_across_indices_and_seeds():
    base = rng.uniform_stream(123, 7, 64)
    assert not np.array_equal(base, rng.uniform_stream(123, 8, 64))
    assert not np.array_equal(base, rng.uniform_stream(124, 7, 64))


def test_uniformity_chi_square():
    u = rng.uniform_stream(2024, 0, 200_000)
    counts, _ = np.histogram(u, bins=100, range=(0, 1))
    chi2 = ((counts - 2000.0) ** 2 / 2000.0).sum()
    assert chi2 <= stats.chi2.ppf(0.999, 99)
    assert u.min() >= 0.0 and u.max() < 1.0


def test_cross_stream_correlation_is_small():
    a = rng.uniform_stream(5, 0, 100_000)
    b = rng.uniform_stream(5, 1, 100_000)
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 0.01


def test_normal_pair_moments():
    key = np.uint64(rng.stream_key(np.uint64(9), np.uint64(0)))
    zs = np.empty(100_000)
    for i in range(0, zs.size, 2):
        z1, z2 = rng.normal_pair(key, np.uint64(i))
        zs[i] = z1
        zs[i + 1] = z2
    assert abs(zs.mean()) <= 4 / np.sqrt(zs.size)
    assert abs(zs.var() - 1.0) <= 0.02
