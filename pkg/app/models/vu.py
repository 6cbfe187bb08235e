"""
Path: app/models/vu.py
Description: Fading and channel distribution of scheduled virtual users (VUs)
"""

from typing import Optional
import numpy as np
from pydantic import BaseModel, ConfigDict

from app.distributions import TabulatedChannelDistribution, WeightedExponentialFading
from app.models.policy import ThresholdTable


class VuDistribution(BaseModel):
    """
    VU fading density c * sum_p pi_p L(p, y) * exp(-y) together with the inputs it
    was built from. `channel` is the tabulated VU channel CDF once it has been mixed
    with path loss.
    """
    fading: WeightedExponentialFading
    pi: np.ndarray
    thresholds: ThresholdTable
    nu_d: float
    channel: Optional[TabulatedChannelDistribution] = None
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def normalization(self) -> float:
        """c = 1 / (mean scheduled packets per slot)."""
        return self.fading.normalization

    @property
    def mean_scheduled_packets(self) -> float:
        return 1.0 / self.fading.normalization
