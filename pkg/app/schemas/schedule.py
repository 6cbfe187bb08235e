"""
Path: app/schemas/schedule.py
Description: Cooling schedule and proposal settings for the annealer
"""

from typing import Literal, Optional
from pydantic import BaseModel, ConfigDict, Field


class AnnealSchedule(BaseModel):
    # t0 and c_sa left empty are calibrated from sampled candidates
    t0: Optional[float] = Field(None, gt=0)
    c_sa: Optional[float] = Field(None, gt=0)
    temp_steps: int = Field(100, ge=1)
    configs_per_temp: Optional[int] = Field(None, ge=1)
    t_min: Optional[float] = Field(None, gt=0)
    proposal: Literal["local", "independent"] = "local"
    eta_min: float = Field(0.05, gt=0, le=1)
    calibration_samples: int = Field(200, ge=2)
    model_config = ConfigDict(frozen=True)

    @property
    def calibrated(self) -> bool:
        return self.t0 is not None and self.c_sa is not None

    def candidates_per_temperature(self, states: int) -> int:
        """50(M+1) unless overridden."""
        if self.configs_per_temp is not None:
            return self.configs_per_temp
        return 50 * (states + 1)
