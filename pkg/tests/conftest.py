from pathlib import Path

import numpy as np
import pytest

from app import config
from app.states import paper_state


ROOT = Path(__file__).resolve().parents[1]
STATES = ROOT / "data" / "states"
PURE = ROOT / "data" / "pure"


@pytest.fixture(autouse=True)
def default_tolerances():
    previous = config.current_tolerances()
    config.set_tolerances(config.Tolerances())
    yield
    config.set_tolerances(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def lapack(monkeypatch):
    """Route hermitian_eig through numpy.linalg.eigh for the big sweeps."""
    monkeypatch.setattr(config, "EIG_BACKEND", "lapack")


@pytest.fixture
def rho_u():
    return paper_state("rho_U")


@pytest.fixture
def rho_v():
    return paper_state("rho_V")


@pytest.fixture
def rho_ku():
    return paper_state("rho_KU")


@pytest.fixture
def rho_kv():
    return paper_state("rho_KV")
