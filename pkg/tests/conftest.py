import numpy as np
import pytest

from filament_lab.constants import ModelConstants
from filament_lab.spin_field import make_scenario_field, random_admissible_field


@pytest.fixture
def unit():
    return ModelConstants()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def kelvin256():
    return make_scenario_field("kelvin_perturbed", 256, m=3, eps=0.05)


@pytest.fixture(scope="session")
def kelvin64():
    return make_scenario_field("kelvin_perturbed", 64, m=3, eps=0.05)


@pytest.fixture(scope="session")
def admissible64():
    return random_admissible_field(64, np.random.default_rng(7))
