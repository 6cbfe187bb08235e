import os
import tempfile

# keep test logs out of the working tree; settings are read once and cached
os.environ.setdefault("LOG_DIR", os.path.join(tempfile.gettempdir(), "opportunistic-scheduler-test-logs"))

import numpy as np
import pytest
from click.testing import CliRunner

from app.schemas.qos import QosSpec
from app.schemas.schedule import AnnealSchedule
from app.schemas.system import SystemConfig
from app.services.annealing_service import AnnealingService
from app.services.chain_service import ChainService
from app.services.channel_service import ChannelService
from app.services.energy_service import EnergyService
from app.services.finite_k_service import FiniteKService
from app.services.simulation_service import SimulationService


@pytest.fixture
def system_config():
    return SystemConfig()


@pytest.fixture
def point_config():
    """delta = 1: every user sits at the cell border, path loss is exactly one."""
    return SystemConfig(delta=1.0)


@pytest.fixture
def basic_spec():
    return QosSpec(buffer=0, ccon=1, theta_tar=0.3, nu_d=0.02)


@pytest.fixture
def basic_rows():
    return [[0.7], [0.9]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def channel_service(system_config):
    return ChannelService(system_config)


@pytest.fixture
def chain_service(channel_service):
    return ChainService(channel_service.fading)


@pytest.fixture
def energy_service(system_config, channel_service, chain_service):
    return EnergyService(system_config, channel_service, chain_service)


@pytest.fixture
def fast_energy_service(system_config, channel_service, chain_service):
    """Coarser VU channel tables and a looser energy tolerance for the annealing tests."""
    return EnergyService(system_config, channel_service, chain_service, grid_points=96, epsabs=1e-6)


@pytest.fixture
def annealing_service(fast_energy_service, chain_service):
    return AnnealingService(fast_energy_service, chain_service)


@pytest.fixture
def simulation_service(channel_service):
    return SimulationService(channel_service)


@pytest.fixture
def finite_k_service():
    return FiniteKService()


@pytest.fixture
def short_schedule():
    return AnnealSchedule(t0=0.05, c_sa=2.0, temp_steps=4, configs_per_temp=15)


@pytest.fixture
def runner():
    return CliRunner()
