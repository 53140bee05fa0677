import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=25, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


def bessel_series(order, z, terms=200):
    """Power series of J_order(z); independent of the library path."""
    from math import gamma

    total, m = 0.0, 0
    while m < terms:
        t = (-1) ** m * (z / 2) ** (order + 2 * m) / (gamma(m + 1) * gamma(m + order + 1))
        total += t
        if m > 5 and abs(t) < 1e-18 * max(abs(total), 1e-300):
            break
        m += 1
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
