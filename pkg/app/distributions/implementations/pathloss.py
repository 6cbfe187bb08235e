"""
Path-Loss Distribution
----------------------

Users spread uniformly over a circular cell with a forbidden region of radius
delta around the access point. Gains are normalized to one at the cell border,
so the support is [1, delta^(-alpha)].
"""

from typing import Tuple
import numpy as np

from ..distribution_interface import DistributionInterface, as_output
from app.schemas.system import SystemConfig


class PathLossDistribution(DistributionInterface):
    def __init__(self, config: SystemConfig):
        self.delta = config.delta
        self.exponent = config.pathloss_exponent
        self.upper = config.max_pathloss
        self._d2 = self.delta ** 2
        self._shape = 2.0 / self.exponent

    @property
    def degenerate(self) -> bool:
        """delta = 1 collapses the cell onto its border: s = 1 almost surely."""
        return self.delta >= 1.0

    def support(self) -> Tuple[float, float]:
        return 1.0, self.upper

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            return as_output(x, np.where(x >= 1.0, 1.0, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = 1.0 - (np.power(np.maximum(x, 1.0), -self._shape) - self._d2) / (1.0 - self._d2)
        values = np.where(x < 1.0, 0.0, np.where(x >= self.upper, 1.0, inner))
        return as_output(x, np.clip(values, 0.0, 1.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            return as_output(x, np.zeros_like(x))
        inside = (x >= 1.0) & (x < self.upper)
        with np.errstate(divide="ignore", invalid="ignore"):
            density = self._shape * np.power(np.maximum(x, 1.0), -self._shape - 1.0) / (1.0 - self._d2)
        return as_output(x, np.where(inside, density, 0.0))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if self.degenerate:
            return as_output(p, np.ones_like(p))
        base = self._d2 + (1.0 - p) * (1.0 - self._d2)
        return as_output(p, np.power(base, -1.0 / self._shape))
