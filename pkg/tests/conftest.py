import numpy as np
import pytest

from panelbreak import PanelMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_panel():
    """Hand-checkable 2 x 4 panel with mirrored rows."""
    return PanelMatrix(np.array([[1.0, 2.0, 3.0, 4.0], [4.0, 3.0, 2.0, 1.0]]))


@pytest.fixture
def gauss_panel(rng):
    return PanelMatrix(rng.standard_normal((50, 60)))


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """Session-local critical-value cache so tests never touch the user cache."""
    return str(tmp_path_factory.mktemp("critcache"))
