"""Test configuration and shared fixtures."""
import pytest

from hinf_delay.core.config import GridConfig, PlantParams, RunConfig, SearchConfig, WeightConfig
from hinf_delay.core.lti import FrequencyGrid
from hinf_delay.synthesis.controller_assembly import synthesize
from hinf_delay.synthesis.fir_analysis import expand
from hinf_delay.synthesis.hinf_synthesis import find_gamma_opt
from hinf_delay.synthesis.plant_factory import factor_plant
from hinf_delay.synthesis.stabilization import solve_bezout

# Reference values for the example design
EXAMPLE_GAMMA_OPT = 0.5584
EXAMPLE_K_F = 1.477
EXAMPLE_DELTA_WEIGHT = -2.037


def pytest_addoption(parser):
    """Add custom command line options for tests."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run slow tests (randomized parameter sweeps)"
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless explicitly enabled."""
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="Need --run-slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def example_plant():
    return PlantParams(k=2.0, a=3.0, b=1.0, h=0.5)


@pytest.fixture(scope="session")
def example_weights():
    return WeightConfig(rho=0.5, alpha=0.1, beta=0.4)


@pytest.fixture(scope="session")
def example_config():
    return RunConfig.example()


@pytest.fixture(scope="session")
def search():
    return SearchConfig()


@pytest.fixture(scope="session")
def grid():
    """The default verification grid."""
    return FrequencyGrid.from_config(GridConfig())


@pytest.fixture(scope="session")
def fact(example_plant):
    return factor_plant(example_plant)


@pytest.fixture(scope="session")
def bez(fact):
    return solve_bezout(fact)


@pytest.fixture(scope="session")
def gamma_result(fact, example_weights, search):
    """Gamma search for the example design (shared, it is the expensive step)."""
    return find_gamma_opt(fact, example_weights, search)


@pytest.fixture(scope="session")
def controller(fact, example_weights, gamma_result):
    """Optimal controller in the gauge k*l21 = 2 used for the reference coefficients."""
    return synthesize(fact, example_weights, gamma_result, k1_lead=2.0)


@pytest.fixture(scope="session")
def expansion(controller):
    return expand(controller)
