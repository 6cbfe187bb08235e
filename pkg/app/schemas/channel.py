"""
Path: app/schemas/channel.py
Description: Batch of sampled channel realizations
"""

import numpy as np
from pydantic import BaseModel, ConfigDict


class ChannelSample(BaseModel):
    """Path loss s, fading f and gain h = s * f, elementwise."""
    pathloss: np.ndarray
    fading: np.ndarray
    gain: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
