import pytest

from ntlf.analysis import FourierWidthProfile, FrequencyGrid
from ntlf.microstrip import Substrate
from ntlf.objective import FilterSpec

D = 0.1

# published coefficients of the two lowpass designs
C1 = (0.3805, 0.2716, -0.0143, -0.1071, -0.4725, 0.7393)
S1 = (-0.1593, -0.0968, -0.1729, -0.8906, 1.1364)
C2 = (0.2333, 0.3900, -0.0637, -0.0078, -0.6005, 0.8461)
S2 = (-0.2200, 0.0929, 0.0569, -1.0636, 0.5341)


@pytest.fixture
def substrate():
    return Substrate(eps_r=3.5, h=762e-6)


@pytest.fixture
def profile1():
    return FourierWidthProfile(D, C1, S1)


@pytest.fixture
def profile2():
    return FourierWidthProfile(D, C2, S2)


@pytest.fixture
def spec1():
    return FilterSpec(2e9, 3e9, 6e9, 0.1, 20.0, 0.13, 10.0, D)


@pytest.fixture
def spec2():
    return FilterSpec(2e9, 3e9, 6e9, 0.3, 20.0, 0.1, 7.0, D)


@pytest.fixture
def grid():
    return FrequencyGrid.uniform(6e9, 120)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
