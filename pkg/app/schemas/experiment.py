"""
Path: app/schemas/experiment.py
Description: Experiment configuration and result rows for the batch runner
Purpose: Parses the JSON experiment file, resolves sweep points into concrete design
points and defines the fixed result-table schema
"""

import json
from typing import List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.qos import QosSpec
from app.schemas.schedule import AnnealSchedule
from app.schemas.system import SystemConfig

SweepAxis = Literal["N", "B", "epsilon", "beta2", "zeta2", "nu_d"]


class SweepSpec(BaseModel):
    axis: SweepAxis
    values: List[float] = Field(default_factory=list)
    model_config = ConfigDict(frozen=True)


class BufferSearchConfig(BaseModel):
    buffers: List[int] = Field(..., min_length=1)
    delta_e_db: float = Field(..., ge=0)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_buffers(self) -> "BufferSearchConfig":
        if any(b < 0 for b in self.buffers):
            raise ValueError("candidate buffers must be nonnegative")
        if len(set(self.buffers)) != len(self.buffers):
            raise ValueError("candidate buffers must be distinct")
        return self


class FiniteKConfig(BaseModel):
    gains: List[float] = Field(..., min_length=1)
    load_factors: Optional[List[float]] = None
    beta2: float = Field(0.0, ge=0)
    model_config = ConfigDict(frozen=True)


class ExperimentConfig(BaseModel):
    system: SystemConfig = Field(default_factory=SystemConfig)
    qos: QosSpec = Field(default_factory=QosSpec)
    schedule: AnnealSchedule = Field(default_factory=AnnealSchedule)
    sweep: Optional[SweepSpec] = None
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    output_dir: str = "results"
    slots: int = Field(1_000_000, ge=1)
    beta2: Optional[float] = Field(None, ge=0)
    policy: Optional[List[List[float]]] = None
    buffer_search: Optional[BufferSearchConfig] = None
    finite_k: Optional[FiniteKConfig] = None
    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_points(self) -> "ExperimentConfig":
        if any(seed < 0 for seed in self.seeds):
            raise ValueError("seeds must be nonnegative")
        for value in self.sweep_values():
            self.at(value)
        return self

    def sweep_values(self) -> List[Optional[float]]:
        if self.sweep is None or not self.sweep.values:
            return [None]
        return list(self.sweep.values)

    def at(self, value: Optional[float]) -> "ExperimentConfig":
        """The design point for one sweep value, validated, with the sweep removed."""
        if value is None:
            return self.model_copy(update={"sweep": None})
        axis = self.sweep.axis
        qos = self.qos.model_dump()
        beta2 = self.beta2
        finite_k = self.finite_k
        if axis == "N":
            if self.qos.heterogeneous:
                raise ValueError("an N sweep needs a homogeneous CCON (no ccon_distribution)")
            qos["ccon"] = self._integer(value, axis)
        elif axis == "B":
            qos["buffer"] = self._integer(value, axis)
        elif axis == "epsilon":
            qos["epsilon"] = value
        elif axis == "nu_d":
            qos["nu_d"] = value
        elif axis == "zeta2":
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"zeta2={value} must lie in [0, 1]")
            qos["ccon"] = 2
            qos["ccon_distribution"] = {1: 1.0 - value, 2: value}
        elif axis == "beta2":
            beta2 = value
            if finite_k is not None:
                finite_k = finite_k.model_copy(update={"beta2": value})
        return ExperimentConfig.model_validate(
            {
                **self.model_dump(exclude={"sweep", "qos", "beta2", "finite_k"}),
                "qos": qos,
                "beta2": beta2,
                "finite_k": None if finite_k is None else finite_k.model_dump(),
            }
        )

    @staticmethod
    def _integer(value: float, axis: str) -> int:
        if float(value) != int(value):
            raise ValueError(f"{axis} sweep values must be integers, got {value}")
        return int(value)


RESULT_COLUMNS: Tuple[str, ...] = (
    "command", "N", "B", "theta_tar", "epsilon", "nu_d", "beta2", "zeta_json", "seed",
    "ebn0_db", "ebn0_linear", "theta_r", "gamma", "feasible", "evaluations", "wall_ms",
)

SUMMARY_COLUMNS: Tuple[str, ...] = (
    "command", "axis", "value", "N", "B", "runs", "feasible",
    "ebn0_db_mean", "ebn0_db_min", "ebn0_db_max",
    "theta_r_mean", "theta_r_min", "theta_r_max",
    "gamma_mean", "gamma_min", "gamma_max",
)

FINITE_K_COLUMNS: Tuple[str, ...] = (
    "beta2", "user", "gain", "rate", "energy_exact", "energy_first_order", "energy_rank_one",
)


def zeta_json(qos: QosSpec) -> str:
    if qos.ccon_distribution is None:
        return ""
    return json.dumps({str(k): v for k, v in sorted(qos.ccon_distribution.items())}, separators=(",", ":"))


class ResultRow(BaseModel):
    command: str
    N: int
    B: int
    theta_tar: float
    epsilon: Optional[float] = None
    nu_d: float
    beta2: Optional[float] = None
    zeta_json: str = ""
    seed: int
    ebn0_db: Optional[float] = None
    ebn0_linear: Optional[float] = None
    theta_r: Optional[float] = None
    gamma: Optional[float] = None
    feasible: bool = False
    evaluations: int = 0
    wall_ms: float = 0.0
    sweep_value: Optional[float] = Field(None, exclude=True)
    model_config = ConfigDict(frozen=True)

    @classmethod
    def for_point(cls, command: str, config: ExperimentConfig, seed: int, **values) -> "ResultRow":
        qos = config.qos
        return cls(
            command=command,
            N=qos.ccon,
            B=qos.buffer,
            theta_tar=qos.theta_tar,
            epsilon=qos.epsilon,
            nu_d=qos.nu_d,
            beta2=config.beta2,
            zeta_json=zeta_json(qos),
            seed=seed,
            **values,
        )


class FiniteKRow(BaseModel):
    beta2: float
    user: int
    gain: float
    rate: float
    energy_exact: Optional[float] = None
    energy_first_order: Optional[float] = None
    energy_rank_one: Optional[float] = None
    model_config = ConfigDict(frozen=True)


class JobOutcome(BaseModel):
    """Everything one (sweep value, seed) job produced."""
    rows: List[ResultRow] = Field(default_factory=list)
    finite_k_rows: List[FiniteKRow] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class SummaryRow(BaseModel):
    command: str
    axis: str = ""
    value: Optional[float] = None
    N: int
    B: int
    runs: int
    feasible: int
    ebn0_db_mean: Optional[float] = None
    ebn0_db_min: Optional[float] = None
    ebn0_db_max: Optional[float] = None
    theta_r_mean: Optional[float] = None
    theta_r_min: Optional[float] = None
    theta_r_max: Optional[float] = None
    gamma_mean: Optional[float] = None
    gamma_min: Optional[float] = None
    gamma_max: Optional[float] = None

