import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional, TypeVar

import numpy as np

from core.channels import choi_vectors
from core.errors import ParameterRangeError
from core.fidelity import check_gate
from core.haar import blocks, haar_states, haar_unitaries, substream
from core.models import DensityMatrix, McEstimate, QuantumChannel

logger = logging.getLogger(__name__)

T = TypeVar("T")


def ordered_map(fn: Callable[[Any], T], items: Iterable[Any], workers: Optional[int] = None) -> List[T]:
    """``fn`` over ``items`` with results in input order whatever the thread count."""
    work = list(items)
    if not workers or workers <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))


def map_blocks(fn: Callable[[int, int], T], n_items: int, workers: Optional[int] = None) -> List[T]:
    return ordered_map(lambda item: fn(*item), blocks(n_items), workers)


def mc_average_gate_fidelity(ch: QuantumChannel, gate: np.ndarray, n_samples: int, seed: int, workers: Optional[int] = None) -> McEstimate:
    """Haar estimate of the mean of <psi|U† E(psi) U|psi>."""
    if n_samples < 1:
        raise ParameterRangeError(f"n_samples must be positive, got {n_samples}")
    d = ch.dim
    gate = check_gate(gate, d)
    kraus = ch.stack()

    def run_block(block: int, size: int) -> np.ndarray:
        psi = haar_states(d, size, substream(seed, block))
        target = psi @ gate.T
        # <U psi| K_i |psi> for every sample and Kraus operator
        overlaps = np.einsum("bx,ixy,by->bi", target.conj(), kraus, psi)
        logger.debug(f"Fidelity block {block}: {size} samples")
        return np.sum(np.abs(overlaps) ** 2, axis=1)

    samples = np.concatenate(map_blocks(run_block, n_samples, workers))
    estimate = McEstimate.from_samples(samples, seed)
    logger.info(f"Monte Carlo gate fidelity: {estimate.mean:.6f} +/- {estimate.std_error:.2e} ({n_samples} samples, seed {seed})")
    return estimate


def mc_average_fidelity(ch: QuantumChannel, n_samples: int, seed: int, workers: Optional[int] = None) -> McEstimate:
    return mc_average_gate_fidelity(ch, np.eye(ch.dim), n_samples, seed, workers)


def mc_twirl_choi(ch: QuantumChannel, n_unitaries: int, seed: int, workers: Optional[int] = None) -> DensityMatrix:
    """Choi state of the empirical twirl: mean over Haar U of the Choi state of rho -> U† E(U rho U†) U."""
    if n_unitaries < 1:
        raise ParameterRangeError(f"n_unitaries must be positive, got {n_unitaries}")
    d = ch.dim
    kraus = ch.stack()

    def run_block(block: int, size: int) -> np.ndarray:
        unitaries = haar_unitaries(d, size, substream(seed, block))
        conjugated = np.einsum("nba,ibc,ncd->niad", unitaries.conj(), kraus, unitaries)
        vectors = choi_vectors(conjugated)
        return np.einsum("nia,nib->ab", vectors, vectors.conj())

    total = np.zeros((d * d, d * d), dtype=np.complex128)
    for partial in map_blocks(run_block, n_unitaries, workers):
        total += partial
    choi = total / n_unitaries
    return DensityMatrix((choi + choi.conj().T) / 2)


def empirical_twirl_channel(ch: QuantumChannel, n_unitaries: int, seed: int) -> QuantumChannel:
    """Kraus form of the empirical twirl, {U_n† K_i U_n / sqrt(N)}, drawn from the same blocks as :func:`mc_twirl_choi`."""
    if n_unitaries < 1:
        raise ParameterRangeError(f"n_unitaries must be positive, got {n_unitaries}")
    d = ch.dim
    kraus = ch.stack()
    parts = []
    for block, size in blocks(n_unitaries):
        unitaries = haar_unitaries(d, size, substream(seed, block))
        parts.append(np.einsum("nba,ibc,ncd->niad", unitaries.conj(), kraus, unitaries).reshape(-1, d, d))
    ops = np.concatenate(parts) / np.sqrt(n_unitaries)
    return QuantumChannel(tuple(ops), ch.tolerance)
