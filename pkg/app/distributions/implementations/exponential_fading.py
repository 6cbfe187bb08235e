"""
Unit-mean exponential small-scale fading (Rayleigh amplitude, power gain f).
"""

from typing import Tuple
import numpy as np

from ..distribution_interface import DistributionInterface, UnboundedSupportError, as_output


class ExponentialFading(DistributionInterface):
    def support(self) -> Tuple[float, float]:
        return 0.0, np.inf

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return as_output(x, np.where(x > 0.0, -np.expm1(-np.maximum(x, 0.0)), 0.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return as_output(x, np.where(x >= 0.0, np.exp(-np.maximum(x, 0.0)), 0.0))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p >= 1.0):
            raise UnboundedSupportError("exponential fading has no finite quantile at p=1")
        if np.any(p < 0.0):
            raise ValueError("quantile probabilities must lie in [0, 1)")
        return as_output(p, -np.log1p(-p))

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0, size)
