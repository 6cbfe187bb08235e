"""
Path: app/schemas/energy.py
Description: Energy-per-bit results and the finite-user power allocation instance
"""

import math
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


def to_db(value: float) -> float:
    if value <= 0:
        return -math.inf
    return 10.0 * math.log10(value) if math.isfinite(value) else math.inf


class EnergyReport(BaseModel):
    """E_b/N0 of a policy: imperfect transmitter CSI (CST) and, with beta2, imperfect CSI at both ends (CSO)."""
    ebn0_cst: float
    ebn0_cso: Optional[float] = None
    beta2: Optional[float] = None
    theta_r: Optional[float] = None
    gamma: Optional[float] = None

    @property
    def ebn0_cst_db(self) -> float:
        return to_db(self.ebn0_cst)

    @property
    def ebn0_cso_db(self) -> Optional[float]:
        return None if self.ebn0_cso is None else to_db(self.ebn0_cso)


class FiniteKInstance(BaseModel):
    """K users sharing a slot through superposition coding and SIC."""
    gains: List[float] = Field(min_length=1)
    rates: List[float]
    beta2: float = Field(0.0, ge=0)
    noise_density: float = Field(1.0, gt=0)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_shapes(self) -> "FiniteKInstance":
        if len(self.rates) != len(self.gains):
            raise ValueError("gains and rates must have the same length")
        if any(h <= 0 for h in self.gains):
            raise ValueError("all gains must be positive")
        if any(r < 0 for r in self.rates):
            raise ValueError("rates must be nonnegative")
        return self

    @classmethod
    def from_load_factors(
        cls,
        gains: List[float],
        spectral_efficiency: float,
        load_factors: Optional[List[float]] = None,
        beta2: float = 0.0,
        noise_density: float = 1.0,
    ) -> "FiniteKInstance":
        """Partial rates R_k = lambda_k C / K; lambda_k defaults to one (equal rates)."""
        K = len(gains)
        load_factors = load_factors if load_factors is not None else [1.0] * K
        if len(load_factors) != K:
            raise ValueError("one load factor per user is required")
        rates = [lam * spectral_efficiency / K for lam in load_factors]
        return cls(gains=gains, rates=rates, beta2=beta2, noise_density=noise_density)

    @property
    def users(self) -> int:
        return len(self.gains)
