"""
Path: app/schemas/optimization.py
Description: Results of annealing runs and of the buffer-size search
"""

from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict

from app.models.chain import ChainSolution
from app.models.policy import Policy
from app.schemas.energy import to_db
from app.schemas.schedule import AnnealSchedule


class OptimizationResult(BaseModel):
    best_policy: Optional[Policy] = None
    best_energy: float = float("inf")
    solution: Optional[ChainSolution] = None
    feasible: bool = False
    evaluations: int = 0
    energy_evaluations: int = 0
    seed: Optional[int] = None
    schedule: Optional[AnnealSchedule] = None
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def best_energy_db(self) -> float:
        return to_db(self.best_energy)

    @property
    def theta_r(self) -> Optional[float]:
        return None if self.solution is None else self.solution.theta_r

    @property
    def gamma(self) -> Optional[float]:
        return None if self.solution is None else self.solution.gamma


class BufferSearchResult(BaseModel):
    """Smallest buffer meeting the energy-gain target, with every run for reference."""
    b_star: Optional[int] = None
    baseline_buffer: int
    target_gain_db: float
    gains_db: Dict[int, float]
    runs: List[OptimizationResult]
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def found(self) -> bool:
        return self.b_star is not None
