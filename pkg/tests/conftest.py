"""
Pytest configuration and fixtures for the AoT scheduler tests.
"""

import pytest

from app.config import Settings
from app.container import Container
from app.experiments import ExperimentService
from app.files import FileStore
from app.instances import generate_instance
from app.models import ChannelTrace, EnergyParams, GenerationConfig, Instance, Task
from app.strategies import StrategyService


# alpha = 1e-9 and lam = 1e-13, so a gain of 1e-4 balances local and offload cost
DEFAULT_PARAMS = EnergyParams(gamma=1e-28, omega=1e5, tau=0.01, lambda0=1e-17, m=3)
BALANCED_GAIN = 1e-4


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow statistical tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def params():
    return DEFAULT_PARAMS


@pytest.fixture
def make_instance():
    """Build an instance from per-application sizes and generation times."""

    def build(
        sizes: list[list[float]],
        gen_times: list[list[float]],
        gains: list[float] | float = BALANCED_GAIN,
        e_max: float = 0.15,
        tau0: float = 10.0,
        horizon: int = 30,
        params: EnergyParams = DEFAULT_PARAMS,
    ) -> Instance:
        if isinstance(gains, float):
            gains = [gains] * horizon
        apps = tuple(
            tuple(
                Task(app=n, index=k, size_bits=size, gen_time=gen)
                for k, (size, gen) in enumerate(zip(app_sizes, app_gens), start=1)
            )
            for n, (app_sizes, app_gens) in enumerate(zip(sizes, gen_times), start=1)
        )
        return Instance(
            apps=apps,
            channel=ChannelTrace(gains=tuple(gains)),
            params=params,
            e_max=e_max,
            tau0=tau0,
            horizon=horizon,
        )

    return build


@pytest.fixture
def single_task_instance(make_instance):
    """One application with one 500-bit task generated at 4, so a_n0 = 6."""
    return make_instance([[500.0]], [[4.0]])


@pytest.fixture
def small_config():
    return GenerationConfig(num_apps=2, tasks_per_app=2, e_max=0.05, horizon=60)


@pytest.fixture
def small_instance(small_config):
    return generate_instance(11, small_config)


@pytest.fixture
def default_instance():
    return generate_instance(7)


@pytest.fixture
def test_settings(tmp_path):
    """Settings writing below a temporary directory."""
    return Settings(output_dir=tmp_path / "results", node_limit=500_000)


@pytest.fixture
def file_store(test_settings):
    return FileStore(test_settings)


@pytest.fixture
def strategy_service(test_settings):
    return StrategyService(test_settings)


@pytest.fixture
def experiment_service(test_settings, file_store):
    return ExperimentService(test_settings, file_store)


@pytest.fixture
def container(test_settings):
    """
    Create and configure a DI container for testing.

    The settings provider is overridden so every service writes below the
    temporary output directory.
    """
    test_container = Container()
    test_container.settings.override(test_settings)
    return test_container
