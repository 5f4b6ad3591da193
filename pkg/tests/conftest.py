import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from distributed_emo.experiments.builtins import (  # noqa: E402
    builtin_minnorm,
    builtin_netflow,
    builtin_nonsmooth10,
    netflow_graph,
)


def pytest_configure(config):
    # Add custom markers for test organization
    config.addinivalue_line("markers", "unit: mark test as a unit test")
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow (long simulated horizons)"
    )


@pytest.fixture(autouse=True)
def mock_env_vars(monkeypatch):
    """Pin the EMO_* environment so Settings sees the documented defaults.

    Variables from the developer's shell or a local .env file would
    otherwise change step sizes, tolerances or output locations.
    """
    monkeypatch.setenv("EMO_LOG_LEVEL", "INFO")
    monkeypatch.setenv("EMO_DEFAULT_STEP", "0.01")
    monkeypatch.setenv("EMO_DEFAULT_T_END", "100")
    monkeypatch.setenv("EMO_DEFAULT_TOL", "1e-6")
    monkeypatch.setenv("EMO_STOP_DWELL", "100")
    monkeypatch.setenv("EMO_SAMPLE_STRIDE", "10")
    monkeypatch.setenv("EMO_CHATTER_WINDOW", "10000")
    monkeypatch.setenv("EMO_SELECTION", "min_norm")
    monkeypatch.setenv("EMO_OUTPUT_DIR", "runs")
    yield


@pytest.fixture
def rng():
    """Seeded generator for randomized checks."""
    return np.random.default_rng(12345)


@pytest.fixture
def nonsmooth10():
    """The ten-agent nonsmooth instance and its ring graph."""
    return builtin_nonsmooth10()


@pytest.fixture
def netflow():
    """The network-flow instance and its arc line graph."""
    return builtin_netflow(), netflow_graph()


@pytest.fixture
def minnorm():
    """The seeded least-norm instance on a ring."""
    return builtin_minnorm(seed=0)
