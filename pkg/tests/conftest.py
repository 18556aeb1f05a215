from pathlib import Path

import numpy as np
import pytest

from cranesim.controller import ControllerGains
from cranesim.dynamics import CraneParameters

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(scope="session")
def params() -> CraneParameters:
    return CraneParameters(tower_inertia=207.13, boom_inertia=2068.0,
                           boom_length=6.2, boom_mass=312.2,
                           payload_mass=50.0, gravity=9.81)


@pytest.fixture(scope="session")
def gains() -> ControllerGains:
    return ControllerGains(k_ad=[100.0, 100.0, 150.0], k_ap=[10.0, 20.0, 50.0],
                           k_ud=[120.0, 120.0], k_up=[10.0, 10.0],
                           alpha1=-1.0, alpha2="sign(beta)")


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


def random_valid_states(n, seed, with_inputs=False):
    from cranesim.oracle import sample_states
    states, inputs = sample_states(n, seed=seed)
    return (states, inputs) if with_inputs else states


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
