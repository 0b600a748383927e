import numpy as np
import pytest

from mdcomp import _kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # Trigger numba compilation once so timed tests see warm kernels.
    _kernels.warmup()
    yield
