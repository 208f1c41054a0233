import numpy as np
import pytest

from hexwrench import NoiseConfig, SensorModel, default_profile_spec, simulate


@pytest.fixture(scope="session")
def model():
    return SensorModel()


@pytest.fixture(scope="session")
def clean_log(model):
    return simulate(default_profile_spec(), model, NoiseConfig.clean())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_wrenches(rng, n, scale=(50, 50, 50, 1, 1, 1)):
    return rng.uniform(-1, 1, (n, 6)) * np.asarray(scale, dtype=float)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
