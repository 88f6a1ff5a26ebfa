import pathlib

import numpy as np
import pytest

from spdmeans import MeanProblem, SpdMatrix, WeightVector

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def example_pair() -> tuple[SpdMatrix, SpdMatrix]:
    """The worked 2x2 pair used for golden values throughout the tests."""
    a = SpdMatrix([[1.0, 2.0], [2.0, 5.0]])
    b = SpdMatrix([[4.0, 4.0], [4.0, 5.0]])
    return a, b


@pytest.fixture
def example_problem(example_pair) -> MeanProblem:
    return MeanProblem(example_pair, WeightVector.uniform(2))


@pytest.fixture
def example_file() -> pathlib.Path:
    return DATA_DIR / "example_pair.json"


def random_sym(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim))
    return scale * (g + g.T) / 2.0
