"""Haar-measure samplers and the seed sub-stream rule.

Every random draw in the package goes through :func:`substream`: the generator for work item
``(seed, i, ...)`` is ``PCG64`` seeded by ``SeedSequence(seed, spawn_key=(i, ...))``; seeds and
indices must be non-negative. Monte Carlo samples are grouped into fixed blocks of :data:`BLOCK_SIZE`;
block ``b`` owns sub-stream ``(seed, b)``, so the sample set never depends on how blocks are distributed over threads.

Complex Gaussians come from ``Generator.standard_normal`` (numpy's ziggurat method, exact in
distribution); real and imaginary parts are drawn as two consecutive arrays.
"""

import logging
from typing import Iterator, Tuple

import numpy as np
from scipy.linalg import qr

from core.errors import ParameterRangeError
from core.models import PureState

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1024


def substream(seed: int, *indices: int) -> np.random.Generator:
    if seed < 0 or any(i < 0 for i in indices):
        raise ParameterRangeError(f"seeds and stream indices must be non-negative, got seed {seed} and indices {indices}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=tuple(indices))))


def blocks(n_samples: int, block_size: int = BLOCK_SIZE) -> Iterator[Tuple[int, int]]:
    """Yield (block index, samples in block) covering n_samples."""
    for b, start in enumerate(range(0, n_samples, block_size)):
        yield b, min(block_size, n_samples - start)


def _ginibre(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unit vectors as rows of an (n, d) array."""
    z = _ginibre(rng, (n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_state(d: int, rng: np.random.Generator) -> PureState:
    return PureState(haar_states(d, 1, rng)[0])


def _fix_phases(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., np.newaxis, :]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = qr(_ginibre(rng, (d, d)))
    return _fix_phases(q, r)


def haar_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unitaries stacked as an (n, d, d) array."""
    q, r = np.linalg.qr(_ginibre(rng, (n, d, d)))
    return _fix_phases(q, r)


def haar_isometry(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """First ``k`` columns of a Haar unitary on dimension ``n``, without building the full unitary."""
    q, r = qr(_ginibre(rng, (n, k)), mode="economic")
    return _fix_phases(q, r)
