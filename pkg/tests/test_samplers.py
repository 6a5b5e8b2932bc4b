import itertools
import math

import numpy as np
import pytest

from compevo.core import Composition, count_compositions
from compevo.oracle import iter_uniform, negbin_log_pmf
from compevo.rng import RngStream, derive_key, splitmix64
from compevo.samplers import (bridge_terms, evolve_step, geometric_terms,
                              sample_bridge, sample_geometric,
                              sample_geometric_conditioned, sample_uniform_bars,
                              sample_uniform_chain, uniform_bars_batch)
from compevo.stats import chi_square_gof, chi_square_two_sample

ALPHA = 1e-4


def test_splitmix_reference_values():
    # published test vector: state 0 produces these first outputs
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_key(1, 0) != derive_key(1, 1)
    assert derive_key(1, 0) != derive_key(2, 0)


def test_reproducibility_bitwise():
    a = geometric_terms(1000, 0.6, RngStream(42, 7))
    b = geometric_terms(1000, 0.6, RngStream(42, 7))
    assert np.array_equal(a, b)
    c = geometric_terms(1000, 0.6, RngStream(42, 8))
    assert not np.array_equal(a, c)


def test_substream_independent_of_sibling_count():
    root = RngStream(5)
    x = root.substream(3)
    y = RngStream(5).substream(3)
    assert np.array_equal(x.generator.random(10), y.generator.random(10))


def test_geometric_p_zero():
    c = sample_geometric(4, 0.0, RngStream(0))
    assert list(c.terms) == [0, 0, 0, 0]


def test_geometric_validation():
    with pytest.raises(ValueError):
        geometric_terms(3, 1.0, RngStream(0))
    with pytest.raises(ValueError):
        geometric_terms(3, -0.5, RngStream(0))


def test_geometric_marginal():
    draws = geometric_terms(1, 0.5, RngStream(11), count=10 ** 5).ravel()
    assert abs((draws == 0).mean() - 0.5) < 0.01
    # pmf chi-square against q p^k over a truncated support
    kmax = 12
    counts = np.bincount(np.minimum(draws, kmax), minlength=kmax + 1)
    probs = np.array([0.5 ** (k + 1) for k in range(kmax)] + [0.5 ** kmax])
    _, pval = chi_square_gof(counts, probs)
    assert pval > ALPHA


def test_geometric_mean_size():
    # mean np/q = 100, per-draw variance n p/q^2 = 200
    sizes = geometric_terms(100, 0.5, RngStream(13), count=10 ** 4).sum(axis=1)
    se = math.sqrt(200.0 / 10 ** 4)
    assert abs(sizes.mean() - 100.0) < 3 * se


def test_uniform_trivial():
    assert list(sample_uniform_bars(3, 0, RngStream(1)).terms) == [0, 0, 0]
    assert list(sample_uniform_chain(5, 0, RngStream(1)).terms) == [0] * 5
    assert list(sample_uniform_bars(1, 7, RngStream(1)).terms) == [7]


def _support_index(n, m):
    return {c: i for i, c in enumerate(iter_uniform(n, m))}


def _counts_from_batch(batch, index):
    counts = np.zeros(len(index), dtype=np.int64)
    for row in batch:
        counts[index[tuple(int(x) for x in row)]] += 1
    return counts


def test_uniform_bars_uniformity():
    n, m, trials = 3, 2, 10 ** 5
    index = _support_index(n, m)
    batch = uniform_bars_batch(n, m, trials, RngStream(21))
    counts = _counts_from_batch(batch, index)
    assert batch.sum(axis=1).tolist() == [m] * trials
    _, pval = chi_square_gof(counts, np.full(6, 1 / 6))
    assert pval > ALPHA
    freqs = counts / trials
    assert np.all(np.abs(freqs - 1 / 6) < 0.01)


def test_uniform_two_of_two():
    n, m, trials = 2, 2, 10 ** 5
    index = _support_index(n, m)
    counts = _counts_from_batch(uniform_bars_batch(n, m, trials, RngStream(22)), index)
    assert np.all(np.abs(counts / trials - 1 / 3) < 0.01)


def test_chain_first_step():
    hits = 0
    trials = 10 ** 5
    base = RngStream(23)
    for i in range(trials):
        c = sample_uniform_chain(2, 1, base.substream(i))
        hits += c[0] == 1
    assert abs(hits / trials - 0.5) < 0.01


def test_chain_matches_bars():
    n, m, trials = 3, 2, 10 ** 4
    index = _support_index(n, m)
    base = RngStream(24)
    chain_counts = np.zeros(len(index), dtype=np.int64)
    for i in range(trials):
        c = sample_uniform_chain(n, m, base.substream(i))
        chain_counts[index[tuple(c)]] += 1
    bar_counts = _counts_from_batch(uniform_bars_batch(n, m, trials, RngStream(25)), index)
    _, pval = chi_square_two_sample(chain_counts, bar_counts)
    assert pval > ALPHA


def test_evolve_step():
    c = Composition([1, 0])
    base = RngStream(26)
    to20 = 0
    trials = 10 ** 5
    for i in range(trials):
        d = evolve_step(c, base.substream(i))
        assert d.size == c.size + 1
        to20 += d[0] == 2
    assert abs(to20 / trials - 2 / 3) < 0.01


def test_bridge_validation():
    with pytest.raises(ValueError):
        bridge_terms(3, 0.5, 0.5, RngStream(0))
    with pytest.raises(ValueError):
        bridge_terms(3, 0.6, 0.5, RngStream(0))


def test_bridge_zero_mass():
    draws = bridge_terms(1, 0.2, 0.5, RngStream(31), count=10 ** 5).ravel()
    assert abs((draws == 0).mean() - 0.625) < 0.01


def test_bridge_convolution():
    # geometric(p1) + bridge(p1, p2) must equal geometric(p2) in distribution
    p1, p2, trials = 0.2, 0.5, 10 ** 5
    g1 = geometric_terms(1, p1, RngStream(32), count=trials).ravel()
    inc = bridge_terms(1, p1, p2, RngStream(33), count=trials).ravel()
    direct = geometric_terms(1, p2, RngStream(34), count=trials).ravel()
    summed = g1 + inc
    hi = int(max(summed.max(), direct.max()))
    _, pval = chi_square_two_sample(np.bincount(summed, minlength=hi + 1),
                                    np.bincount(direct, minlength=hi + 1))
    assert pval > ALPHA


def test_conditioned_matches_uniform():
    # conditioning the geometric model on its size recovers the uniform model
    n, m, p, trials = 3, 2, 0.5, 3 * 10 ** 4
    index = _support_index(n, m)
    counts = np.zeros(len(index), dtype=np.int64)
    base = RngStream(35)
    got = 0
    chunk = 0
    while got < trials:
        draws = geometric_terms(n, p, base.substream(chunk), count=4096)
        chunk += 1
        for row in draws[draws.sum(axis=1) == m]:
            counts[index[tuple(int(x) for x in row)]] += 1
            got += 1
            if got == trials:
                break
    _, pval = chi_square_gof(counts, np.full(len(index), 1 / len(index)))
    assert pval > ALPHA


def test_conditioned_single_draw():
    c = sample_geometric_conditioned(3, 0.5, 2, RngStream(36))
    assert c.size == 2 and c.n == 3


def test_negbin_pmf_normalizes():
    n, p = 3, 0.4
    total = sum(math.exp(negbin_log_pmf(n, p, m)) for m in range(200))
    assert abs(total - 1.0) < 1e-12
    assert negbin_log_pmf(2, 0.0, 0) == 0.0


def test_batch_matches_loop_sampler():
    # the rank-trick batch and the Floyd single-draw agree in distribution
    n, m, trials = 4, 3, 2 * 10 ** 4
    index = _support_index(n, m)
    batch = _counts_from_batch(uniform_bars_batch(n, m, trials, RngStream(37)), index)
    base = RngStream(38)
    single = np.zeros(len(index), dtype=np.int64)
    for i in range(trials):
        single[index[tuple(sample_uniform_bars(n, m, base.substream(i)))]] += 1
    _, pval = chi_square_two_sample(batch, single)
    assert pval > ALPHA
