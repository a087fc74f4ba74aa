import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dtvstab import EvolutionFamily, GeneratorSpec  # noqa: E402


@pytest.fixture
def half():
    return EvolutionFamily(GeneratorSpec.scalar(0.5))


@pytest.fixture
def two_eighth():
    return EvolutionFamily(GeneratorSpec.periodic([[[2.0]], [[0.125]]]))


@pytest.fixture
def zero_gen():
    return EvolutionFamily(GeneratorSpec.scalar(0.0))


@pytest.fixture
def jordan():
    return EvolutionFamily(GeneratorSpec.constant([[0.5, 1.0], [0.0, 0.5]]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
