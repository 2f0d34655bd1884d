import numpy as np
import pytest
from hypothesis import strategies as st

from floquet_pt.drive import DriveProtocol

energies = st.floats(min_value=-3, max_value=3, allow_nan=False)
durations = st.floats(min_value=0.05, max_value=5, allow_nan=False)


@st.composite
def protocols(draw, energy=energies, duration=durations):
    return DriveProtocol.from_values(
        draw(energy), draw(energy), draw(energy), draw(energy), draw(duration), draw(duration)
    )


def random_protocols(rng, n, emax=3.0, tmin=0.05, tmax=5.0):
    e = rng.uniform(-emax, emax, size=(n, 4))
    t = rng.uniform(tmin, tmax, size=(n, 2))
    return [DriveProtocol.from_values(*e[i], *t[i]) for i in range(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20201016)


def fig1(omega=1.0, gamma=0.2):
    return DriveProtocol.from_omega(1.0, 1.0, gamma, 0.0, omega, 0.5)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion; the summary prints them in order."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
