import numpy as np
import pytest

from valmod import _kernels, make_series

# acceptance criteria report one line each at the end of the run
ACCEPTANCE_RECORDS: list[tuple[str, str]] = []


def record_criterion(name: str, status: str) -> None:
    ACCEPTANCE_RECORDS.append((name, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RECORDS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in ACCEPTANCE_RECORDS:
        terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # jit compilation happens once here, not inside a timed or parametrized test
    _kernels.warmup()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture()
def random_series(rng):
    return make_series(rng.standard_normal(256), name="random256")


@pytest.fixture()
def walk_series(rng):
    return make_series(np.cumsum(rng.standard_normal(400)), name="walk400")
