"""
Path: app/services/channel_service.py
Description: Propagation model (path loss x small-scale fading)
Purpose: Exact path-loss and fading distribution functions, seeded sampling, and the
CDF of the product channel gain h = s * f for any fading distribution
"""

import warnings
from typing import Optional
import numpy as np
from scipy import integrate

from app.distributions import (
    DistributionInterface,
    ExponentialFading,
    PathLossDistribution,
)
from app.schemas.system import SystemConfig
from app.schemas.channel import ChannelSample
from app.settings import get_settings
from app.logging_config import get_logger

logger = get_logger(__name__)


class QuadratureError(ArithmeticError):
    """Raised when an adaptive quadrature misses its error tolerance."""


class ChannelService:
    def __init__(self, config: SystemConfig, epsabs: Optional[float] = None):
        self.config = config
        self.pathloss = PathLossDistribution(config)
        self.fading = ExponentialFading()
        self.epsabs = epsabs if epsabs is not None else get_settings().quad_epsabs

    # Path loss
    def pathloss_cdf(self, x):
        return self.pathloss.cdf(x)

    def pathloss_pdf(self, x):
        return self.pathloss.pdf(x)

    def pathloss_sample(self, rng: np.random.Generator, size=None):
        return self.pathloss.sample(rng, size)

    # Small-scale fading
    def fading_cdf(self, y):
        return self.fading.cdf(y)

    def fading_pdf(self, y):
        return self.fading.pdf(y)

    def fading_quantile(self, p):
        return self.fading.quantile(p)

    def fading_sample(self, rng: np.random.Generator, size=None):
        return self.fading.sample(rng, size)

    def gain_sample(
        self,
        rng: np.random.Generator,
        size: int,
        fading: Optional[DistributionInterface] = None,
    ) -> ChannelSample:
        """Draw path loss and fading independently and return their product."""
        fading = fading or self.fading
        s = np.atleast_1d(self.pathloss.sample(rng, size))
        f = np.atleast_1d(fading.sample(rng, size))
        return ChannelSample(pathloss=s, fading=f, gain=s * f)

    def gain_cdf(self, x, fading: Optional[DistributionInterface] = None):
        """
        P(s * f <= x) by adaptive quadrature over the path-loss support.

        The integral runs in t = log(s), where the path-loss density becomes the
        smooth weight (2/alpha) exp(-2t/alpha) / (1 - delta^2). Every point where
        x * exp(-t) meets a fading breakpoint is handed to the integrator as a
        subdivision point. Arrays of x are integrated jointly.

        Raises:
            QuadratureError: if the estimated error exceeds the tolerance.
        """
        fading = fading or self.fading
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if self.pathloss.degenerate:
            values = np.atleast_1d(fading.cdf(xs))
            return float(values[0]) if np.ndim(x) == 0 else values

        shape = 2.0 / self.config.pathloss_exponent
        scale = shape / (1.0 - self.config.delta ** 2)
        upper = self.config.log_max_pathloss
        positive = xs > 0
        values = np.zeros_like(xs)
        if not np.any(positive):
            return float(values[0]) if np.ndim(x) == 0 else values
        targets = xs[positive]

        points = self._subdivision_points(targets, fading, upper)

        def integrand(t):
            return np.asarray(fading.cdf(targets * np.exp(-t))) * scale * np.exp(-shape * t)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            result, error = integrate.quad_vec(
                integrand,
                0.0,
                upper,
                epsabs=self.epsabs,
                epsrel=0.0,
                norm="max",
                points=points or None,
                limit=20000,
            )
        if not error <= 10 * self.epsabs:
            logger.error(f"gain CDF quadrature error {error:.3e} exceeds tolerance {self.epsabs:.1e}")
            raise QuadratureError(
                f"gain CDF quadrature did not converge: error {error:.3e} > {self.epsabs:.1e}"
            )
        values[positive] = np.clip(result, 0.0, 1.0)
        return float(values[0]) if np.ndim(x) == 0 else values

    @staticmethod
    def _subdivision_points(targets: np.ndarray, fading: DistributionInterface, upper: float) -> list:
        edges = np.array([b for b in fading.breakpoints if b > 0], dtype=float)
        if edges.size == 0:
            return []
        crossings = np.log(targets[:, None] / edges[None, :]).ravel()
        crossings = crossings[(crossings > 0) & (crossings < upper)]
        # nearly coincident points only add empty intervals
        return list(np.unique(np.round(crossings, 12)))
