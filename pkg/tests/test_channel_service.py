"""Tests for path loss, fading and the composite channel gain"""
import numpy as np
import pytest
from scipy import integrate, stats

from app.distributions import WeightedExponentialFading
from app.schemas.system import SystemConfig
from app.services.channel_service import ChannelService


def direct_gain_cdf(service, x, fading_cdf):
    """P(s f <= x) integrated in the path-loss domain, one decade at a time."""
    s_max = service.config.max_pathloss
    edges = np.geomspace(1.0, s_max, int(round(np.log10(s_max))) + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(
            lambda s: service.pathloss_pdf(s) * fading_cdf(x / s), lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200
        )
        total += value
    return total


def test_pathloss_cdf_values(channel_service):
    assert channel_service.pathloss_cdf(4.0) == pytest.approx(0.7500750, abs=1e-7)
    assert channel_service.pathloss_cdf(1.0) == pytest.approx(0.0, abs=1e-15)
    assert channel_service.pathloss_cdf(0.5) == 0.0
    assert channel_service.pathloss_cdf(1e4) == pytest.approx(1.0)
    assert channel_service.pathloss_cdf(2e4) == 1.0


def test_pathloss_pdf_is_cdf_derivative(channel_service):
    for x in (1.5, 3.0, 40.0, 900.0):
        h = 1e-5 * x
        slope = (channel_service.pathloss_cdf(x + h) - channel_service.pathloss_cdf(x - h)) / (2 * h)
        assert channel_service.pathloss_pdf(x) == pytest.approx(slope, rel=1e-6)
    assert channel_service.pathloss_pdf(0.5) == 0.0
    assert channel_service.pathloss_pdf(2e4) == 0.0


def test_pathloss_quantile_inverts_cdf(channel_service):
    xs = np.array([1.0, 1.7, 12.0, 350.0, 9999.0])
    assert np.allclose(channel_service.pathloss.quantile(channel_service.pathloss_cdf(xs)), xs, rtol=1e-10)


def test_pathloss_cdf_inverts_quantile(channel_service):
    us = np.linspace(0.0, 1.0 - 1e-9, 1001)
    assert np.max(np.abs(channel_service.pathloss_cdf(channel_service.pathloss.quantile(us)) - us)) < 1e-12


class FixedUniforms:
    """Generator stand-in handing out a fixed list of uniforms."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def random(self, size=None):
        return self.values[:size] if size is not None else float(self.values[0])


def test_pathloss_sampler_maps_uniforms(channel_service):
    draws = channel_service.pathloss_sample(FixedUniforms([0.0, 0.7500750, 1.0 - 1e-12]), 3)
    assert draws[0] == pytest.approx(1.0, abs=1e-12)
    assert draws[1] == pytest.approx(4.0, rel=1e-6)
    assert draws[2] == pytest.approx(0.01 ** -2.0, rel=1e-6)
    assert channel_service.pathloss_sample(FixedUniforms([0.0])) == pytest.approx(1.0)


def test_pathloss_samples_follow_cdf(channel_service, rng):
    samples = channel_service.pathloss_sample(rng, 20000)
    assert samples.min() >= 1.0
    assert samples.max() <= 1e4
    assert stats.kstest(samples, channel_service.pathloss_cdf).pvalue > 1e-3


@pytest.mark.slow
def test_pathloss_million_samples_within_ks_band(channel_service, rng):
    n = 1_000_000
    samples = channel_service.pathloss_sample(rng, n)
    statistic = stats.kstest(samples, channel_service.pathloss_cdf).statistic
    # 99.9% band of the Kolmogorov distribution
    assert statistic < 1.949 / np.sqrt(n)


def test_fading_is_unit_mean_exponential(channel_service, rng):
    assert channel_service.fading_cdf(1.0) == pytest.approx(1.0 - np.exp(-1.0))
    assert channel_service.fading_pdf(0.0) == pytest.approx(1.0)
    assert channel_service.fading_quantile(1.0 - np.exp(-2.0)) == pytest.approx(2.0)
    samples = channel_service.fading_sample(rng, 50000)
    assert samples.mean() == pytest.approx(1.0, abs=4 / np.sqrt(50000))


def test_gain_cdf_matches_direct_integration(channel_service):
    for x in (0.01, 0.5, 3.0, 200.0):
        expected = direct_gain_cdf(channel_service, x, lambda y: 1.0 - np.exp(-y))
        assert channel_service.gain_cdf(x) == pytest.approx(expected, abs=1e-8)


def test_gain_cdf_accepts_arrays(channel_service):
    xs = np.array([0.0, 0.1, 1.0, 10.0, 100.0])
    values = channel_service.gain_cdf(xs)
    assert isinstance(values, np.ndarray)
    assert values[0] == 0.0
    assert np.all(np.diff(values) > 0)
    for x, value in zip(xs[1:], values[1:]):
        assert channel_service.gain_cdf(float(x)) == pytest.approx(value, abs=1e-8)


def test_gain_cdf_against_monte_carlo(channel_service, rng):
    n = 200000
    draws = channel_service.gain_sample(rng, n)
    assert np.allclose(draws.gain, draws.pathloss * draws.fading)
    for x in (0.3, 2.0, 20.0):
        p = channel_service.gain_cdf(x)
        empirical = np.mean(draws.gain <= x)
        assert abs(empirical - p) < 4 * np.sqrt(p * (1 - p) / n)


@pytest.mark.slow
def test_gain_cdf_against_million_draws(channel_service, rng):
    n = 1_000_000
    draws = channel_service.gain_sample(rng, n)
    xs = np.array([0.05, 0.3, 2.0, 20.0, 500.0])
    expected = channel_service.gain_cdf(xs)
    empirical = np.mean(draws.gain[:, None] <= xs[None, :], axis=0)
    assert np.all(np.abs(empirical - expected) < 4 * np.sqrt(expected * (1 - expected) / n))


def test_gain_cdf_with_weighted_fading(channel_service, rng):
    fading = WeightedExponentialFading([0.4, 1.2], [0.3, 1.0])
    for x in (0.5, 2.0, 30.0):
        expected = direct_gain_cdf(channel_service, x, fading.cdf)
        assert channel_service.gain_cdf(x, fading) == pytest.approx(expected, abs=1e-8)
    draws = channel_service.gain_sample(rng, 100000, fading)
    assert draws.fading.min() >= 0.4


def test_degenerate_pathloss_reduces_to_fading(point_config):
    service = ChannelService(point_config)
    assert service.pathloss.degenerate
    assert service.pathloss_cdf(0.99) == 0.0
    assert service.pathloss_cdf(1.0) == 1.0
    for x in (0.2, 1.0, 3.5):
        assert service.gain_cdf(x) == pytest.approx(1.0 - np.exp(-x))


def test_pathloss_exponent_changes_the_law():
    service = ChannelService(SystemConfig(pathloss_exponent=4.0, delta=0.1))
    # shape 2/alpha = 0.5, s_max = delta^-alpha = 1e4
    x = 16.0
    expected = 1.0 - (x ** -0.5 - 0.01) / (1.0 - 0.01)
    assert service.pathloss_cdf(x) == pytest.approx(expected)
    assert service.pathloss.support() == (1.0, pytest.approx(1e4))
