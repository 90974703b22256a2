import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from htlab import make_base_config


@pytest.fixture(scope="session")
def cfg_u5():
    """Unramified: p=5, E = u - 5, so pi = 5, beta = 5."""
    return make_base_config(5, [-5], f=1, precision=8)


@pytest.fixture(scope="session")
def cfg_r2():
    """Ramified: p=2, E = u^2 - 2, so pi^2 = 2, E'(pi) = 2 pi, beta = 4."""
    return make_base_config(2, [-2, 0], f=1, precision=8)


@pytest.fixture(scope="session")
def cfg_f2():
    """Unramified residue extension: p=3, f=2, E = u - 3."""
    return make_base_config(3, [-3], f=2, precision=8)
