from __future__ import annotations

import pytest

from aihm.catalog import bundled_catalog
from aihm.scenario import power_grid_steps, run_steps


@pytest.fixture(scope="session")
def catalog():
    return bundled_catalog()


@pytest.fixture(scope="session")
def scenario_engine():
    """The full scripted power-grid scenario, run once per session."""
    return run_steps(power_grid_steps())


@pytest.fixture(scope="session")
def scenario_log_text(scenario_engine):
    return scenario_engine.log.serialize()
