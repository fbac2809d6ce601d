import numpy as np
import pytest

from binckks.presets import get_preset
from binckks.ring import RingParams
from binckks.sampling import RngHandle
from binckks.scheme import keygen


@pytest.fixture(scope="session")
def p64():
    return RingParams(64, 32)


@pytest.fixture(scope="session")
def keys64(p64):
    pr = get_preset("desk-64")
    return keygen(p64, pr.h, pr.sigma, 4, 2.0 ** 9, RngHandle(11))


@pytest.fixture(scope="session")
def keys64_test_mode(p64):
    """Refresh key with noiseless entries."""
    pr = get_preset("desk-64")
    return keygen(p64, pr.h, pr.sigma, 4, 2.0 ** 9, RngHandle(11), noiseless_refresh_key=True)


@pytest.fixture
def gen():
    return np.random.default_rng(1234)
