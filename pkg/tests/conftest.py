from pathlib import Path

import numpy as np
import pytest

from core.haar import haar_unitary, substream
from core.models import DensityMatrix

FIXTURES = Path(__file__).parent / "fixtures"


def random_matrix(d: int, seed: int) -> np.ndarray:
    rng = substream(seed, 99)
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(d: int, seed: int) -> np.ndarray:
    a = random_matrix(d, seed)
    return (a + a.conj().T) / 2


def random_density(d: int, seed: int) -> DensityMatrix:
    a = random_matrix(d, seed)
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def random_gate(d: int, seed: int) -> np.ndarray:
    return haar_unitary(d, substream(seed, 7))


@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return str(FIXTURES / name)

    return _path
