"""
Path: app/schemas/qos.py
Description: Scheduler design parameters (buffer, continuity constraint, drop targets)
Purpose: Validates the design point handed to the chain builder, the annealer and the simulator
"""

from typing import Dict, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

ZETA_TOLERANCE = 1e-9


class QosSpec(BaseModel):
    buffer: int = Field(0, ge=0)
    ccon: Optional[int] = Field(None, ge=1)
    ccon_distribution: Optional[Dict[int, float]] = None
    theta_tar: float = Field(0.3, ge=0, le=1)
    epsilon: Optional[float] = Field(None, ge=0, le=1)  # None means unconstrained
    nu_d: float = Field(0.02, ge=0, lt=1)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def fill_ccon(cls, data):
        if isinstance(data, dict) and data.get("ccon") is None:
            zeta = data.get("ccon_distribution")
            if zeta:
                data = {**data, "ccon": max(int(k) for k in zeta)}
            else:
                data = {**data, "ccon": 1}
        return data

    @model_validator(mode="after")
    def check_consistency(self) -> "QosSpec":
        if self.epsilon is not None and self.epsilon > self.theta_tar:
            raise ValueError(
                f"epsilon={self.epsilon} must not exceed theta_tar={self.theta_tar}"
            )
        zeta = self.ccon_distribution
        if zeta is not None:
            if not zeta:
                raise ValueError("ccon_distribution must not be empty")
            if any(n < 1 for n in zeta):
                raise ValueError("CCON values in ccon_distribution must be positive")
            if any(w < 0 for w in zeta.values()):
                raise ValueError("ccon_distribution weights must be nonnegative")
            total = sum(zeta.values())
            if abs(total - 1.0) > ZETA_TOLERANCE:
                raise ValueError(f"ccon_distribution must sum to 1, got {total}")
            if max(zeta) != self.ccon:
                raise ValueError(
                    f"ccon={self.ccon} must equal the largest CCON value {max(zeta)}"
                )
        return self

    @property
    def states(self) -> int:
        """M = B + N, the index of the last chain state."""
        return self.buffer + self.ccon

    @property
    def nu_s(self) -> float:
        return 1.0 - self.nu_d

    @property
    def heterogeneous(self) -> bool:
        return self.ccon_distribution is not None

    @property
    def constrained(self) -> bool:
        return self.epsilon is not None

    def zeta(self, n: int) -> float:
        """Weight of CCON value n; a homogeneous spec puts all mass on N."""
        if self.ccon_distribution is None:
            return 1.0 if n == self.ccon else 0.0
        return self.ccon_distribution.get(n, 0.0)
