import numpy as np
import pytest

from gifpsi import SamplerConfig, VectorSpaceConfig, standard_construction

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def std2():
    return standard_construction(VectorSpaceConfig(2), k=1.0)


@pytest.fixture
def small_sampler():
    return SamplerConfig(seed=42, samples=1000)


@pytest.fixture
def theta2():
    return np.zeros(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
