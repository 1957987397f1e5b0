"""Pytest configuration and shared fixtures."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from riq.config import reset_config
from riq.core.synth import mlp_arch, synth_model
from riq.models.calibration import CalibrationSet

DESK_WIDTHS = [32, 64, 128, 128, 64, 16]
DESK_CALIB_COUNT = 8


def make_desk_model(seed: int = 0):
    """Seeded 5-layer dense MLP: ReLU hidden layers, identity output, Gaussian init."""
    return synth_model(seed, mlp_arch(DESK_WIDTHS))


@pytest.fixture
def tmp_path():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture(autouse=True)
def riq_home(tmp_path, monkeypatch):
    """Point RIQ_HOME at a fresh directory and drop cached config between tests."""
    home = tmp_path / ".riq"
    monkeypatch.setenv("RIQ_HOME", str(home))
    for var in ("RIQ_EPS0", "RIQ_STOP_THRESHOLD", "RIQ_PRECISION"):
        monkeypatch.delenv(var, raising=False)
    reset_config()
    yield home
    reset_config()


@pytest.fixture(scope="session")
def desk_model():
    """The desk model (weights are read-only, so one instance is shared)."""
    return make_desk_model()


@pytest.fixture(scope="session")
def desk_calib():
    """8 standard-normal calibration samples for the desk model."""
    return CalibrationSet.gaussian((DESK_WIDTHS[0],), count=DESK_CALIB_COUNT, seed=0)


@pytest.fixture
def toy_model():
    """Small 8-16-4 MLP for quick tests."""
    return synth_model(1, mlp_arch([8, 16, 4]))


@pytest.fixture
def toy_calib():
    return CalibrationSet.gaussian((8,), count=4, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
