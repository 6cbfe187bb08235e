"""
Path: app/models/chain.py
Description: Steady-state solution of the scheduling chain
"""

import numpy as np
from pydantic import BaseModel, ConfigDict


class ChainSolution(BaseModel):
    pi: np.ndarray
    theta_r: float
    gamma: float
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
