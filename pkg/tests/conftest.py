import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pushcorrect.experiments import ExperimentConfig, run_experiment


@pytest.fixture(scope="session")
def sim_trend_results():
    """Four sim-mode experiments at 1000 trials each, plus total wall time."""
    t0 = time.perf_counter()
    results = {}
    for exp in ("nominal", "translation", "orientation", "estimator_proxy"):
        cfg = ExperimentConfig(experiment=exp, mode="sim", trials=1000,
                               base_seed=42_000)
        results[exp] = run_experiment(cfg)
    return results, time.perf_counter() - t0


@pytest.fixture(scope="session")
def real_trend_results():
    """Four real-mode experiments at 1000 trials each."""
    results = {}
    for exp in ("nominal", "translation", "orientation", "estimator_proxy"):
        cfg = ExperimentConfig(experiment=exp, mode="real", trials=1000,
                               base_seed=51_000)
        results[exp] = run_experiment(cfg)
    return results
