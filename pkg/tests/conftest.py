"""
Pytest configuration and fixtures for qnd_lab tests
"""
import math
import os
import sys

import numpy as np
import pytest
from loguru import logger

# Add repository root to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from qnd_lab.models.bath_models import BathSpec, TemperatureMode
from qnd_lab.models.system_models import PureState
from qnd_lab.services.qnd_dynamics import coherent_state_populations, two_level_spectrum


@pytest.fixture
def caplog(caplog):
    """Route loguru records into pytest's caplog"""
    handler_id = logger.add(caplog.handler, format="{message}", level="DEBUG")
    yield caplog
    logger.remove(handler_id)


@pytest.fixture
def fig1_bath():
    """gamma0 = 0.1, omega_c = 50, a = 0, T = 0, no squeezing"""
    return BathSpec(gamma0=0.1, omega_c=50.0, a=0.0)


@pytest.fixture
def squeezed_bath():
    """Zero-temperature bath with r = 0.4 and a small squeezing-phase slope"""
    return BathSpec(gamma0=0.1, omega_c=50.0, r=0.4, a=0.01)


@pytest.fixture
def hot_bath():
    """High-temperature bath at T = 300"""
    return BathSpec(gamma0=0.1, omega_c=50.0, r=0.4, temperature_mode=TemperatureMode.HIGH, T=300.0)


@pytest.fixture
def qubit_spectrum():
    return two_level_spectrum(1.0)


@pytest.fixture
def plus_state():
    """(|1> + |0>) / sqrt(2)"""
    return PureState(np.full(2, 1 / math.sqrt(2), dtype=complex))


@pytest.fixture
def coherent_five():
    """Coherent state with |alpha|^2 = 5"""
    return coherent_state_populations(5.0)


@pytest.fixture
def single_thread(monkeypatch):
    """Force sequential parallel_map"""
    from qnd_lab.core.config import settings
    monkeypatch.setattr(settings, "QND_LAB_THREADS", 1)
    return settings
