"""
Tabulated Channel Distribution
------------------------------

Channel-gain distribution known through CDF values on a grid (for example the
VU channel obtained by mixing VU fading with path loss). Monotone PCHIP
interpolation in log-gain gives the CDF, its derivative and the inverse.
"""

from typing import Tuple
import numpy as np
from scipy.interpolate import PchipInterpolator

from ..distribution_interface import DistributionInterface, as_output


class TabulatedChannelDistribution(DistributionInterface):
    def __init__(self, gains, probabilities):
        gains = np.asarray(gains, dtype=float)
        probs = np.clip(np.maximum.accumulate(np.asarray(probabilities, dtype=float)), 0.0, 1.0)
        if gains.ndim != 1 or gains.shape != probs.shape or gains.size < 2:
            raise ValueError("need matching one-dimensional gain and probability tables")
        if gains[0] <= 0 or np.any(np.diff(gains) <= 0):
            raise ValueError("gains must be positive and strictly increasing")
        probs[0] = 0.0
        probs[-1] = 1.0

        self.gains = gains
        self.probabilities = probs
        log_gains = np.log(gains)
        self._cdf = PchipInterpolator(log_gains, probs, extrapolate=False)
        self._density = self._cdf.derivative()

        # the inverse needs strictly increasing abscissae: keep the first of each run
        keep = np.concatenate(([True], np.diff(probs) > 0))
        if probs[keep].size >= 2 and np.all(np.diff(probs[keep]) > 0):
            self._inverse = PchipInterpolator(probs[keep], log_gains[keep], extrapolate=False)
        else:
            raise ValueError("tabulated probabilities must increase somewhere")

    def support(self) -> Tuple[float, float]:
        return float(self.gains[0]), float(self.gains[-1])

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior table nodes, where the interpolating cubic changes"""
        return tuple(float(g) for g in self.gains[1:-1])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            values = self._cdf(np.log(np.clip(x, self.gains[0], self.gains[-1])))
        values = np.where(x < self.gains[0], 0.0, np.where(x >= self.gains[-1], 1.0, values))
        return as_output(x, np.clip(values, 0.0, 1.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.gains[0]) & (x < self.gains[-1])
        clipped = np.clip(x, self.gains[0], self.gains[-1])
        values = np.where(inside, self._density(np.log(clipped)) / clipped, 0.0)
        return as_output(x, np.maximum(values, 0.0))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("quantile probabilities must lie in [0, 1]")
        return as_output(p, np.exp(self._inverse(p)))
