from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from repnet.generate import identifying_sensor_domain, noisy_sensor_domain, trade_domain


def with_arrays(spec, **arrays):
    """Copy of ``spec`` with some arrays / fields replaced."""
    return dataclasses.replace(spec, **arrays)


@pytest.fixture
def noisy():
    return noisy_sensor_domain()


@pytest.fixture
def trade():
    return trade_domain()


@pytest.fixture
def identifying():
    return identifying_sensor_domain()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
