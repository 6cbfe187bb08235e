"""
Path: app/schemas/simulation.py
Description: Packet-level simulation reports and their validation verdicts
"""

from typing import Dict, List, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SimReport(BaseModel):
    """
    Empirical counterparts of the chain quantities. Standard errors are batch
    means over consecutive blocks of slots.
    """
    slots: int = Field(..., ge=1)
    empirical_pi: np.ndarray
    pi_stderr: np.ndarray
    empirical_theta_r: float
    theta_r_stderr: float
    empirical_gamma: float
    gamma_stderr: float
    burst_histogram: Dict[int, int]
    max_burst: int
    transmissions: int
    nack_fraction: float
    landing_counts: Dict[int, int] = Field(default_factory=dict)
    vu_fading_edges: np.ndarray
    vu_fading_histogram: np.ndarray
    energy_estimate: Optional[float] = None
    energy_stderr: Optional[float] = None
    seed: Optional[int] = None
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ValidationVerdict(BaseModel):
    passed: bool
    conclusive: bool
    confidence: float
    statistics: Dict[str, float]
    failures: List[str] = Field(default_factory=list)
    model_config = ConfigDict(frozen=True)
