import os
import sys

import numpy as np
import pytest
from hypothesis import settings

from relaysec.channel import FadingConfig, sample_channel

# reproducible by default; HYPOTHESIS_PROFILE=explore draws fresh examples
settings.register_profile("repo", derandomize=True, deadline=None)
settings.register_profile("explore", deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


def complex_gaussian(rng, m, sigma=2.0):
    return sigma / np.sqrt(2.0) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))


@pytest.fixture(scope="session")
def fig2_draws():
    """100 realizations at M=5, sigma_h = sigma_z = 2."""
    cfg = FadingConfig(m=5, sigma_h=2.0, sigma_z=2.0, seed=0)
    return [sample_channel(cfg, i) for i in range(100)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
