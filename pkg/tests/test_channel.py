"""Fading model and asymmetry ratios: distribution checks, determinism, exact values."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noma_relay import (
    ChannelRealization,
    LinkStats,
    RngStream,
    StructuralError,
    degree_of_asymmetry,
    hop_asymmetry,
    relay_asymmetry,
    sample_gain,
    sample_gains,
    sample_realization,
    sample_realization_block,
)

N_DRAWS = 10**6


def test_sample_mean_unit_variance():
    draws = sample_gains(LinkStats("L", 1.0), RngStream(1234, 0), N_DRAWS)
    assert 0.99 <= draws.mean() <= 1.01


def test_sample_mean_variance_ten():
    draws = sample_gains(LinkStats("L", 10.0), RngStream(1234, 1), N_DRAWS)
    assert abs(draws.mean() - 10.0) <= 0.1


def test_empirical_moments_and_ks():
    # Exp(mean sigma^2): std error of mean = sigma^2/sqrt(n), of variance ~ sigma^4*sqrt(8/n)
    sigma2 = 2.5
    draws = sample_gains(LinkStats("L", sigma2), RngStream(77, 3), N_DRAWS)
    se_mean = sigma2 / np.sqrt(N_DRAWS)
    assert abs(draws.mean() - sigma2) <= 3 * se_mean
    var = draws.var(ddof=1)
    se_var = sigma2**2 * np.sqrt(8.0 / N_DRAWS)
    assert abs(var - sigma2**2) <= 3 * se_var
    # Kolmogorov-Smirnov against the exponential CDF, 1% critical value 1.628/sqrt(n)
    x = np.sort(draws)
    cdf = 1.0 - np.exp(-x / sigma2)
    grid = np.arange(1, N_DRAWS + 1) / N_DRAWS
    d = max(np.max(np.abs(grid - cdf)), np.max(np.abs(grid - 1.0 / N_DRAWS - cdf)))
    assert d < 1.628 / np.sqrt(N_DRAWS)


def test_stream_repeatability_and_independence():
    a = sample_gains(LinkStats("L", 1.0), RngStream(99, 5), 64)
    b = sample_gains(LinkStats("L", 1.0), RngStream(99, 5), 64)
    c = sample_gains(LinkStats("L", 1.0), RngStream(99, 6), 64)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_single_gain_matches_realization():
    links = [LinkStats("A", 2.0), LinkStats("B", 5.0)]
    stream = RngStream(42, 7)
    real = sample_realization(links, stream)
    assert set(real.gains) == {"A", "B"}
    assert all(g >= 0 for g in real.gains.values())
    assert sample_gain(LinkStats("A", 2.0), stream) >= 0


def test_block_rows_match_per_trial_realizations():
    links = [LinkStats("A", 2.0), LinkStats("B", 5.0)]
    block = sample_realization_block(links, 314, np.arange(8))
    for t in range(8):
        real = sample_realization(links, RngStream(314, t))
        for l in links:
            assert block[l.link_id][t] == real.gains[l.link_id]


def test_block_mean_gains_returns_variances():
    links = [LinkStats("A", 2.0), LinkStats("B", 5.0)]
    block = sample_realization_block(links, 314, np.arange(4), mean_gains=True)
    assert np.array_equal(block["A"], np.full(4, 2.0))
    assert np.array_equal(block["B"], np.full(4, 5.0))


def test_link_stats_rejects_bad_variance():
    with pytest.raises(StructuralError):
        LinkStats("L", 0.0)
    with pytest.raises(StructuralError):
        LinkStats("L", -1.0)
    with pytest.raises(StructuralError):
        LinkStats("L", float("nan"))


def test_realization_rejects_bad_gains():
    with pytest.raises(StructuralError):
        ChannelRealization({"A": -0.1})
    with pytest.raises(StructuralError):
        ChannelRealization({"A": float("inf")})
    real = ChannelRealization({"A": 1.0})
    with pytest.raises(StructuralError):
        real.gain("B")


def test_degree_of_asymmetry_values():
    assert degree_of_asymmetry(10, 1) == 10.0
    assert degree_of_asymmetry(3.5, 3.5) == 1.0
    # a misassigned strong/weak label is reported, not rejected
    assert degree_of_asymmetry(2, 4) == 0.5
    with pytest.raises(StructuralError):
        degree_of_asymmetry(0, 1)
    with pytest.raises(StructuralError):
        degree_of_asymmetry(1, -2)


def test_relay_asymmetry_values():
    assert relay_asymmetry(9, 3, 10, 2) == 15.0
    assert 4.70 <= relay_asymmetry(9, 3.8, 10, 5) <= 4.75
    assert relay_asymmetry(5, 5, 7, 7) == 1.0


def test_hop_asymmetry_single_link_is_one():
    assert hop_asymmetry([4.2]) == 1.0
    assert hop_asymmetry([2.0, 8.0]) == 4.0
    with pytest.raises(StructuralError):
        hop_asymmetry([])


@given(
    a=st.floats(0.01, 1e3),
    b=st.floats(0.01, 1e3),
    c=st.floats(0.01, 1e3),
    d=st.floats(0.01, 1e3),
)
def test_relay_asymmetry_is_product_of_degrees(a, b, c, d):
    assert relay_asymmetry(a, b, c, d) == degree_of_asymmetry(a, b) * degree_of_asymmetry(c, d)
