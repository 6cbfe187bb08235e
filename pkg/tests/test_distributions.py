"""Tests for the distribution implementations"""
import numpy as np
import pytest
from scipy import integrate

from app.distributions import (
    ExponentialFading,
    PointMassDistribution,
    TabulatedChannelDistribution,
    UnboundedSupportError,
    UndefinedDistributionError,
    WeightedExponentialFading,
)


def test_exponential_quantile_at_one_is_unbounded():
    fading = ExponentialFading()
    with pytest.raises(UnboundedSupportError):
        fading.quantile(1.0)
    with pytest.raises(ValueError):
        fading.quantile(-0.1)


def test_point_mass():
    mass = PointMassDistribution(2.0)
    assert mass.cdf(1.999) == 0.0
    assert mass.cdf(2.0) == 1.0
    assert mass.quantile(0.3) == 2.0
    assert mass.support() == (2.0, 2.0)
    with pytest.raises(ValueError):
        PointMassDistribution(0.0)


def test_unweighted_fading_is_plain_exponential():
    fading = WeightedExponentialFading([0.0], [1.0])
    assert fading.normalization == pytest.approx(1.0)
    ys = np.array([0.1, 1.0, 4.0])
    assert np.allclose(fading.cdf(ys), 1.0 - np.exp(-ys))
    assert np.allclose(fading.pdf(ys), np.exp(-ys))


def test_weighted_fading_density_integrates_to_one():
    fading = WeightedExponentialFading([0.2, 0.9, 2.5], [0.4, 0.7, 1.0])
    total = sum(
        integrate.quad(fading.pdf, lo, hi)[0]
        for lo, hi in [(0.0, 0.2), (0.2, 0.9), (0.9, 2.5), (2.5, np.inf)]
    )
    assert total == pytest.approx(1.0, abs=1e-10)
    assert fading.cdf(0.19) == 0.0
    assert fading.cdf(np.inf) == pytest.approx(1.0)
    assert fading.lower_edge == 0.2
    assert fading.breakpoints == (0.2, 0.9, 2.5)


def test_weighted_fading_quantile_inverts_cdf():
    fading = WeightedExponentialFading([0.2, 0.9, 2.5], [0.4, 0.7, 1.0])
    ys = np.array([0.25, 0.9, 1.3, 2.5, 6.0])
    assert np.allclose(fading.quantile(fading.cdf(ys)), ys, rtol=1e-10)
    with pytest.raises(UnboundedSupportError):
        fading.quantile(1.0)


def test_weighted_fading_skips_zero_weight_segments():
    fading = WeightedExponentialFading([0.0, 1.0], [0.0, 1.0])
    assert fading.lower_edge == 1.0
    assert fading.normalization == pytest.approx(np.e)
    assert fading.quantile(0.0) == pytest.approx(1.0)


def test_weighted_fading_rejects_empty_weighting():
    with pytest.raises(UndefinedDistributionError):
        WeightedExponentialFading([], [])
    with pytest.raises(UndefinedDistributionError):
        WeightedExponentialFading([0.5], [0.0])
    with pytest.raises(ValueError):
        WeightedExponentialFading([1.0, 0.5], [1.0, 2.0])


def test_tabulated_channel_reproduces_a_known_law():
    gains = np.geomspace(1e-3, 40.0, 400)
    table = TabulatedChannelDistribution(gains, 1.0 - np.exp(-gains))
    for x in (0.01, 0.5, 2.0, 10.0):
        assert table.cdf(x) == pytest.approx(1.0 - np.exp(-x), abs=1e-4)
        assert table.pdf(x) == pytest.approx(np.exp(-x), rel=2e-2)
    for p in (0.1, 0.5, 0.9):
        assert table.quantile(p) == pytest.approx(-np.log1p(-p), rel=1e-3)
    assert table.cdf(1e-4) == 0.0
    assert table.cdf(50.0) == 1.0


def test_tabulated_channel_validates_its_table():
    with pytest.raises(ValueError):
        TabulatedChannelDistribution([1.0], [0.5])
    with pytest.raises(ValueError):
        TabulatedChannelDistribution([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        TabulatedChannelDistribution([1.0, 2.0], [0.2, 0.5]).quantile(1.5)
