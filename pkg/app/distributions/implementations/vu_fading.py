"""
Virtual-User Fading Distribution
--------------------------------

Fading seen by scheduled packets: the unit-mean exponential density reweighted by
a nondecreasing step function w(y) (the mean number of packets scheduled at
fading y), then normalized:

    p(y) = c * w(y) * exp(-y),   w(y) = w_k for edges[k] <= y < edges[k+1]

with w(y) = 0 below the first edge. CDF and quantile are exact.
"""

from typing import Sequence, Tuple
import numpy as np

from ..distribution_interface import DistributionInterface, UnboundedSupportError, as_output


class UndefinedDistributionError(ValueError):
    """Raised when a weighting puts no mass anywhere (a policy that never schedules)."""


class WeightedExponentialFading(DistributionInterface):
    """
    Attributes:
        edges: strictly increasing finite segment starts, edges[0] >= 0
        weights: step value on each segment, the last one extending to infinity
        normalization: the constant c making the density integrate to one
    """

    def __init__(self, edges: Sequence[float], weights: Sequence[float]):
        edges = np.asarray(edges, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if edges.shape != weights.shape or edges.size == 0:
            raise UndefinedDistributionError("fading weighting has no finite segment")
        if np.any(np.diff(edges) <= 0) or edges[0] < 0:
            raise ValueError("segment edges must be nonnegative and strictly increasing")
        if np.any(weights < 0):
            raise ValueError("segment weights must be nonnegative")

        upper = np.append(edges[1:], np.inf)
        raw_mass = weights * (np.exp(-edges) - np.exp(-upper))
        total = raw_mass.sum()
        if not total > 0:
            raise UndefinedDistributionError("fading weighting has zero total mass")

        self.edges = edges
        self.weights = weights
        self.normalization = 1.0 / total
        self._upper = upper
        self._mass = raw_mass * self.normalization
        self._cum = np.concatenate(([0.0], np.cumsum(self._mass)))
        self._cum[-1] = 1.0

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(e) for e in self.edges)

    @property
    def lower_edge(self) -> float:
        """Smallest fading value with positive density."""
        first = int(np.argmax(self.weights > 0))
        return float(self.edges[first])

    def support(self) -> Tuple[float, float]:
        return self.lower_edge, np.inf

    def _segment(self, y: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.edges, y, side="right") - 1

    def pdf(self, x):
        y = np.asarray(x, dtype=float)
        k = self._segment(y)
        w = np.where(k >= 0, self.weights[np.clip(k, 0, None)], 0.0)
        return as_output(x, self.normalization * w * np.exp(-np.maximum(y, 0.0)))

    def cdf(self, x):
        y = np.asarray(x, dtype=float)
        k = self._segment(y)
        kc = np.clip(k, 0, None)
        partial = self.normalization * self.weights[kc] * (np.exp(-self.edges[kc]) - np.exp(-np.maximum(y, self.edges[kc])))
        values = np.where(k >= 0, self._cum[kc] + partial, 0.0)
        return as_output(x, np.clip(values, 0.0, 1.0))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p >= 1.0):
            raise UnboundedSupportError("virtual-user fading has no finite quantile at p=1")
        if np.any(p < 0.0):
            raise ValueError("quantile probabilities must lie in [0, 1)")
        # skip zero-mass segments so every probability lands where w > 0
        k = np.searchsorted(self._cum[1:], p, side="right")
        k = np.clip(k, 0, self.edges.size - 1)
        remaining = (p - self._cum[k]) / (self.normalization * np.where(self.weights[k] > 0, self.weights[k], np.inf))
        inner = np.exp(-self.edges[k]) - remaining
        values = -np.log(np.maximum(inner, np.finfo(float).tiny))
        values = np.minimum(np.maximum(values, self.edges[k]), self._upper[k])
        return as_output(p, values)

