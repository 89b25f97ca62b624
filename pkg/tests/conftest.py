import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pfiber import ModelParams

settings.register_profile("pfiber", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pfiber")


@pytest.fixture
def unit_params():
    """e = 1, R = 1, sigma = 0 with the default shift gamma0 = pi."""
    return ModelParams.with_default_gamma0(1.0, 1.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
