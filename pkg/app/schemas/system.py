"""
Path: app/schemas/system.py
Description: Physical system parameters shared by every module
"""

import math
from pydantic import BaseModel, ConfigDict, Field


class SystemConfig(BaseModel):
    """Spectral efficiency, cell geometry, path-loss exponent and noise density."""
    spectral_efficiency: float = Field(0.5, gt=0)
    delta: float = Field(0.01, gt=0, le=1)
    pathloss_exponent: float = Field(2.0, gt=0)
    noise_density: float = Field(1.0, gt=0)
    model_config = ConfigDict(frozen=True)

    @property
    def max_pathloss(self) -> float:
        """Upper edge of the path-loss support, delta^(-alpha)."""
        return self.delta ** (-self.pathloss_exponent)

    @property
    def log_max_pathloss(self) -> float:
        return -self.pathloss_exponent * math.log(self.delta)
