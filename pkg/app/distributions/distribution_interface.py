"""
Distribution Interface Module
-----------------------------

This module defines the abstract base class for the one-dimensional gain
distributions used throughout the scheduler toolkit (path loss, small-scale
fading, the fading of scheduled virtual users, and channel gains).
All implementations are immutable after construction and may be shared between
worker processes; random draws always go through an explicitly passed
numpy Generator.

Classes:
    DistributionInterface: Abstract base class defining the distribution contract
"""

from abc import ABC, abstractmethod
from typing import Tuple
import numpy as np


class UnboundedSupportError(ValueError):
    """Raised when a quantile is requested at a probability with no finite value."""


class DistributionInterface(ABC):
    @abstractmethod
    def cdf(self, x):
        """Cumulative distribution function, scalar or array"""
        pass

    @abstractmethod
    def pdf(self, x):
        """Density with respect to Lebesgue measure, scalar or array"""
        pass

    @abstractmethod
    def quantile(self, p):
        """Inverse CDF for probabilities in [0, 1)"""
        pass

    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed interval carrying all the probability mass"""
        pass

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior points where the density is discontinuous or has a kink"""
        return ()

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw"""
        return self.quantile(rng.random(size))


def as_output(x, values):
    """Return a float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(values)
    return values
