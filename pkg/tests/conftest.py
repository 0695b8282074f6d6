import numpy as np
import pytest

from polyloewner import HerglotzField, catalog_generator, evolve_jet
from polyloewner.kernels import default_backend


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile/cache the jit kernels once so timed tests measure steady state."""
    if default_backend() != "numba":
        return
    for name, degree in (("H1", 3), ("H1", 4), ("H6", 3), ("H6", 4)):
        field = HerglotzField.constant(catalog_generator(name, degree=degree))
        evolve_jet(field, 0.0, 0.05, degree=degree)


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def interior_points(rng, count, dim, radius=0.8):
    z = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    scale = np.max(np.abs(z), axis=-1, keepdims=True)
    return radius * rng.uniform(0.1, 1.0, size=(count, 1)) * z / scale


@pytest.fixture
def make_interior_points(rng):
    def _make(count, dim, radius=0.8):
        return interior_points(rng, count, dim, radius)

    return _make
