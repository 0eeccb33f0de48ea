import numpy as np
import pytest

from gausschan.gaussian_core import GaussianState, rotation

ACCEPTANCE_LINES: list[str] = []


def random_symplectic_1mode(rng) -> np.ndarray:
    """Rotation * squeezer * rotation: a generic single-mode symplectic."""
    r = rng.uniform(-1.0, 1.0)
    return rotation(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(r), np.exp(-r)]) @ rotation(
        rng.uniform(0, 2 * np.pi)
    )


def random_physical_state(rng) -> GaussianState:
    s = random_symplectic_1mode(rng)
    nu = 1.0 + rng.exponential(1.0)
    return GaussianState(nu * s @ s.T, rng.normal(0, 2, size=2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
