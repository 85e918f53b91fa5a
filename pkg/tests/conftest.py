import numpy as np
import pytest

from fracgl import Grid, example1, example2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@pytest.fixture
def ex1():
    return example1(1.5, 1.5)


@pytest.fixture
def ex2():
    return example2(1.5, 1.5)


@pytest.fixture
def small_grid(ex1):
    return Grid.from_params(ex1, 16, 10)
