import pytest
from hypothesis import HealthCheck, settings

from gffkit.statelab.kernels import clear_cache
from gffkit.statelab.packets import random_packets

settings.register_profile("gffkit", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("gffkit")


@pytest.fixture(scope="session")
def packets():
    return random_packets(4, seed=3)


@pytest.fixture(scope="session")
def complex_packets():
    return random_packets(3, seed=11, real=False)


@pytest.fixture(autouse=True, scope="module")
def _fresh_smear_cache():
    clear_cache()
    yield


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
