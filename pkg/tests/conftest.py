"""Shared fixtures for the acceptance suite.

The large Monte Carlo tables are expensive (about a minute each), so they
are sampled once per session and shared by every criterion that needs
them.
"""

import numpy as np
import pytest

from hotnet import montecarlo
from hotnet.params import ScenarioKind, SystemParams

SEED = 20260823
TAU_GRID_DB = np.array([-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0])


@pytest.fixture(scope="session")
def defaults() -> SystemParams:
    return SystemParams()


@pytest.fixture(scope="session")
def table_integrated(defaults):
    """10^5 full trials of the integrated deployment."""
    return montecarlo.run_trials(defaults, ScenarioKind.INTEGRATED,
                                 100_000, seed=SEED)


@pytest.fixture(scope="session")
def table_two_tier(defaults):
    """10^5 full trials of the all-Sub-6GHz two-tier comparison deployment."""
    return montecarlo.run_trials(defaults, ScenarioKind.TWO_TIER_SUB6,
                                 100_000, seed=SEED)


@pytest.fixture(scope="session")
def mc_curve_integrated(table_integrated):
    return montecarlo.estimate_coverage(table_integrated, TAU_GRID_DB)


@pytest.fixture(scope="session")
def mc_curve_two_tier(table_two_tier):
    return montecarlo.estimate_coverage(table_two_tier, TAU_GRID_DB)
