"""
Path: app/settings.py
Description: Process-level settings read from the environment
Purpose: Numerical tolerances, table sizes and logging locations that are not part
of an experiment config but may need tuning per machine
"""

import os
from functools import lru_cache
from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class Settings(BaseModel):
    log_dir: str = "logs"
    log_level: str = "INFO"
    energy_grid_points: int = Field(400, ge=32)
    quad_epsabs: float = Field(1e-9, gt=0)
    energy_epsabs: float = Field(1e-7, gt=0)
    sim_batches: int = Field(50, ge=2)


@lru_cache
def get_settings() -> Settings:
    """
    Build settings from environment variables (a `.env` file is honoured).
    """
    return Settings(
        log_dir=os.getenv("LOG_DIR", "logs"),
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
        energy_grid_points=int(os.getenv("ENERGY_GRID_POINTS", "400")),
        quad_epsabs=float(os.getenv("QUAD_EPSABS", "1e-9")),
        energy_epsabs=float(os.getenv("ENERGY_EPSABS", "1e-7")),
        sim_batches=int(os.getenv("SIM_BATCHES", "50")),
    )
