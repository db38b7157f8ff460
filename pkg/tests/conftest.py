from pathlib import Path

import numpy as np
import pytest

from ncretx import TransmissionMatrix

DATA_DIR = Path(__file__).parent / "data"

# the worked-example matrix: 4 receivers, 5 packets, 10 lost cells
WORKED_EXAMPLE_ROWS = [
    [1, 1, 0, 0, 1],
    [0, 1, 0, 1, 0],
    [0, 1, 1, 0, 0],
    [1, 0, 0, 1, 1],
]


@pytest.fixture
def worked_example() -> TransmissionMatrix:
    return TransmissionMatrix.from_rows(WORKED_EXAMPLE_ROWS)


@pytest.fixture
def worked_example_path() -> Path:
    return DATA_DIR / "worked_example.txt"


def random_matrix(rng: np.random.Generator, max_receivers: int = 8,
                  max_batch: int = 20) -> TransmissionMatrix:
    """A loss realization with random shape and per-receiver loss rates."""
    m = int(rng.integers(2, max_receivers + 1))
    n = int(rng.integers(1, max_batch + 1))
    p = rng.uniform(0.05, 0.95, size=m)
    cells = rng.random((m, n)) < p[:, None]
    return TransmissionMatrix(cells.astype(np.uint8))
