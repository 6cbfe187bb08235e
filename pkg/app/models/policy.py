"""
Path: app/models/policy.py
Description: Scheduling policy and threshold value objects
Purpose: Immutable containers for the per-state scheduling probabilities, the full
transition matrix derived from them, and the equivalent fading thresholds
"""

from typing import Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.qos import QosSpec


def frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


class Policy(BaseModel):
    """
    Scheduling probabilities for states 0..M and the transition matrix Q = Q_s + Q_c.

    Row p of sched_probs holds alpha_hat[p][0..min(p,B)]; entry q is the probability
    of moving to state q by scheduling min(p,B)-q+1 packets.
    """
    spec: QosSpec
    sched_probs: Tuple[np.ndarray, ...]
    matrix: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def states(self) -> int:
        return self.spec.states

    @property
    def buffer(self) -> int:
        return self.spec.buffer

    @property
    def heterogeneous(self) -> bool:
        return self.spec.heterogeneous

    @property
    def no_sched(self) -> np.ndarray:
        """alpha_tilde[p] = 1 - sum_q alpha_hat[p][q]."""
        return np.array([1.0 - row.sum() for row in self.sched_probs])

    @property
    def scheduled_mass(self) -> np.ndarray:
        return np.array([row.sum() for row in self.sched_probs])


class ThresholdTable(BaseModel):
    """
    Descending fading thresholds kappa[p][0] >= ... >= kappa[p][min(p,B)] >= 0.

    np.inf marks an interval that is never selected.
    """
    buffer: int
    kappa: Tuple[np.ndarray, ...]
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def states(self) -> int:
        return len(self.kappa) - 1

    def lowest(self) -> np.ndarray:
        """Minimum fading needed to schedule at least one packet, per state."""
        return np.array([row[-1] for row in self.kappa])
