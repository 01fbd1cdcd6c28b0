"""Shared fixtures; the expensive 10-seed sweep is computed once per session."""

from dataclasses import replace
from pathlib import Path

import pytest

from dopacube.harness import ExperimentConfig, run_experiment

FIXTURE_DIR = Path(__file__).parent / "fixtures"

ACCEPTANCE_SEEDS = tuple(range(10))


@pytest.fixture(scope="session")
def burst_result():
    """One default burst run, reused by every test that only reads it."""
    return run_experiment(ExperimentConfig(seed=0))


@pytest.fixture(scope="session")
def no_burst_result():
    return run_experiment(ExperimentConfig(seed=0, burst=None))


@pytest.fixture(scope="session")
def sweep():
    """Burst and no-burst runs for the 10 acceptance seeds, plus wall time."""
    import time

    t0 = time.time()
    runs = {}
    for seed in ACCEPTANCE_SEEDS:
        config = ExperimentConfig(seed=seed)
        runs[seed] = (
            run_experiment(config),
            run_experiment(replace(config, burst=None)),
        )
    elapsed = time.time() - t0
    return runs, elapsed
