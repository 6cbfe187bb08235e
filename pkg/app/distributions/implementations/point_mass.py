"""
Point-mass gain, used for closed-form checks of the energy functionals.
"""

from typing import Tuple
import numpy as np

from ..distribution_interface import DistributionInterface, as_output


class PointMassDistribution(DistributionInterface):
    def __init__(self, value: float):
        if value <= 0:
            raise ValueError("point-mass gain must be positive")
        self.value = float(value)

    def support(self) -> Tuple[float, float]:
        return self.value, self.value

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.value,)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return as_output(x, np.where(x >= self.value, 1.0, 0.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return as_output(x, np.where(x == self.value, np.inf, 0.0))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return as_output(p, np.full_like(p, self.value))
