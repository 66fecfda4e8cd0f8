import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from ensembles.rng import stream  # noqa: E402
from runtime.settings import Settings  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run, skipped unless --runslow is given")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> np.random.Generator:
    return stream(20240601)


@pytest.fixture
def fast_settings() -> Settings:
    return Settings({"estimator": {"restarts": 8}, "net": {"probes": 2000}, "threads": 1})


def random_matrix(rng: np.random.Generator, rows: int, cols: int = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = random_matrix(rng, d)
    return 0.5 * (g + g.conj().T)
