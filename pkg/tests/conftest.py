"""Shared fixtures: expensive simulation cells are run once per session."""

import numpy as np
import pytest

from oslr.logrank import ReferenceCurve, oslr_test
from oslr.simulation import Scenario, generate_cohort, replicate_rng, run_scenario

# frozen master seed for every deterministic desk-scale study in the suite
MASTER_SEED = 20260815

PI_GRID = (1.0, 0.5, 0.25, 0.125, 0.0625)


@pytest.fixture(scope="session")
def pi_sweep():
    """10,000-replicate cells at kappa=1, n_B=50 for each allocation ratio."""
    results = {}
    for pi in PI_GRID:
        scenario = Scenario(
            kappa=1.0, n_b=50, pi=pi, replicates=10000, seed=MASTER_SEED
        )
        results[pi] = run_scenario(scenario)
    return results


@pytest.fixture(scope="session")
def cell_pi1(pi_sweep):
    """The balanced cell (pi = 1) used by several band checks."""
    return pi_sweep[1.0]


@pytest.fixture(scope="session")
def nb_cells():
    """10,000-replicate cells at pi = 0.5 for n_B = 25 and 200."""
    return {
        nb: run_scenario(
            Scenario(kappa=1.0, n_b=nb, pi=0.5, replicates=10000, seed=MASTER_SEED)
        )
        for nb in (25, 200)
    }


@pytest.fixture(scope="session")
def truth_z_sample():
    """z-scores of the fixed-truth test at n_B = 10,000 over 2,000 replicates.

    Returns (z_w0, z_w05) where z_w05 covers the first 500 replicates only
    (enough for the w-irrelevance check).
    """
    scenario = Scenario(
        kappa=1.0, n_b=10000, pi=1.0, replicates=2000, seed=MASTER_SEED
    )
    ref = ReferenceCurve.fixed("weibull", [scenario.kappa, scenario.sigma])
    z_w0 = np.empty(2000)
    z_w05 = np.empty(500)
    for i in range(2000):
        cohort = generate_cohort(scenario, "B", replicate_rng(MASTER_SEED, i))
        z_w0[i] = oslr_test(ref, cohort, w=0.0).z
        if i < 500:
            z_w05[i] = oslr_test(ref, cohort, w=0.5).z
    return z_w0, z_w05
