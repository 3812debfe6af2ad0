import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from instances import EXAMPLE_SET, example_geometry, example_windows  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def geo():
    return example_geometry()


@pytest.fixture
def S():
    return EXAMPLE_SET


@pytest.fixture
def windows():
    return example_windows()
