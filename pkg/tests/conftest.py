import math

import numpy as np
import pytest

from atomfield.model_core import ModelParams, PositionGrid, QubitAmplitudes, gaussian_package


@pytest.fixture
def regime_params():
    # omega0/omega = 1e3, (g chi/omega0)^2 = 1e4; ground-state width
    return ModelParams.from_gchi(1.0, 1e-3, 100.0, 1.0, 5e-4)


@pytest.fixture
def regime_env(regime_params):
    grid = PositionGrid.for_gaussian(regime_params.alpha0)
    return gaussian_package(regime_params.alpha0, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_qubit(rng) -> QubitAmplitudes:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return QubitAmplitudes.normalized(*v)


PLUS = QubitAmplitudes(1 / math.sqrt(2), 1 / math.sqrt(2))
MINUS = QubitAmplitudes(1 / math.sqrt(2), -1 / math.sqrt(2))


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
