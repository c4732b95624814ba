import numpy as np
import pytest

from prootkit import _backend


@pytest.fixture(params=_backend.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.backend_name()
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(0xA11CE)
