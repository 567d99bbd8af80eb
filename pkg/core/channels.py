import logging
from typing import Union

import numpy as np

from core.basis import shift_clock_element
from core.errors import DimensionMismatchError, NotUnitaryError, ParameterRangeError
from core.haar import haar_isometry, substream
from core.linalg import STRUCTURE_TOL, as_matrix, dagger, maximally_entangled_state, validate_unitary
from core.models import DensityMatrix, DepolarizingParams, QuantumChannel, as_operator

logger = logging.getLogger(__name__)


def _check_dims(ch: QuantumChannel, dim: int, what: str):
    if ch.dim != dim:
        raise DimensionMismatchError(f"{what} has dimension {dim}, channel acts on dimension {ch.dim}")


def apply_operator(ch: QuantumChannel, a: Union[np.ndarray, DensityMatrix]) -> np.ndarray:
    """Kraus sum extended linearly to any operator, Hermitian or not."""
    a = as_operator(a)
    _check_dims(ch, a.shape[0], "operator")
    kraus = ch.stack()
    return np.einsum("iab,bc,idc->ad", kraus, a, kraus.conj())


def apply(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    _check_dims(ch, rho.dim, "state")
    out = apply_operator(ch, rho.matrix)
    return DensityMatrix((out + dagger(out)) / 2)


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel((np.eye(d, dtype=np.complex128),))


def unitary_channel(u: np.ndarray) -> QuantumChannel:
    u = as_matrix(u, "unitary")
    if not validate_unitary(u, STRUCTURE_TOL):
        raise NotUnitaryError(f"matrix of shape {u.shape} is not unitary at tolerance {STRUCTURE_TOL:g}")
    return QuantumChannel((u,))


def depolarizing(d: int, p: float) -> QuantumChannel:
    """Kraus realization of pI/d + (1-p)rho through the shift/clock operators."""
    params = DepolarizingParams(d, p)
    if d < 2:
        return identity_channel(d)
    weight_identity = max(1 - params.p + params.p / d**2, 0.0)
    weight_other = params.p / d**2
    kraus = []
    for k in range(d):
        for l in range(d):
            weight = weight_identity if (k, l) == (0, 0) else weight_other
            if weight > 0:
                kraus.append(np.sqrt(weight) * shift_clock_element(d, k, l))
    return QuantumChannel(tuple(kraus))


def compose(first: QuantumChannel, then: QuantumChannel) -> QuantumChannel:
    """Channel applying ``first`` and then ``then``: Kraus set {L_j K_i}."""
    if first.dim != then.dim:
        raise DimensionMismatchError(f"cannot compose channels of dimension {first.dim} and {then.dim}")
    return QuantumChannel(tuple(l @ k for l in then.kraus_ops for k in first.kraus_ops), max(first.tolerance, then.tolerance))


def conjugated_channel(ch: QuantumChannel, u: np.ndarray) -> QuantumChannel:
    """rho -> U† E(U rho U†) U, the integrand of the twirl."""
    u = np.asarray(u, dtype=np.complex128)
    return QuantumChannel(tuple(dagger(u) @ k @ u for k in ch.kraus_ops), ch.tolerance)


def random_channel(d: int, kraus_rank: int, seed: int) -> QuantumChannel:
    """Stinespring dilation: d x d blocks of the first block column of a Haar unitary on d*kraus_rank."""
    if not 1 <= kraus_rank <= d * d:
        raise ParameterRangeError(f"Kraus rank must lie in [1, {d * d}], got {kraus_rank}")
    isometry = haar_isometry(d * kraus_rank, d, substream(seed))
    return QuantumChannel(tuple(isometry[i * d : (i + 1) * d, :] for i in range(kraus_rank)))


def choi_vectors(kraus: np.ndarray) -> np.ndarray:
    # (I kron K)|phi> = sum_j |j> kron K|j> / sqrt(d), i.e. K^T row-major over sqrt(d)
    d = kraus.shape[-1]
    return np.swapaxes(kraus, -1, -2).reshape(*kraus.shape[:-2], d * d) / np.sqrt(d)


def choi_matrix(ch: QuantumChannel) -> np.ndarray:
    vectors = choi_vectors(ch.stack())
    return np.einsum("ia,ib->ab", vectors, vectors.conj())


def choi_state(ch: QuantumChannel) -> DensityMatrix:
    """(I kron E)(|phi><phi|) with the reference system as first factor."""
    return DensityMatrix(choi_matrix(ch))


def choi_distance(a: Union[np.ndarray, DensityMatrix], b: Union[np.ndarray, DensityMatrix]) -> float:
    return float(np.linalg.norm(as_operator(a) - as_operator(b)))


def choi_overlap(choi: Union[np.ndarray, DensityMatrix], local_unitary=None) -> float:
    d2 = as_operator(choi).shape[0]
    phi = maximally_entangled_state(int(round(np.sqrt(d2))), local_unitary)
    return float(np.real(np.vdot(phi, as_operator(choi) @ phi)))


def exact_twirl(ch: QuantumChannel) -> DepolarizingParams:
    """Depolarizing parameter of the Haar twirl, read off the twirl-invariant entanglement fidelity."""
    d = ch.dim
    entanglement_fidelity = choi_overlap(choi_matrix(ch))
    p = (1 - entanglement_fidelity) * d**2 / (d**2 - 1)
    logger.debug(f"Exact twirl: F_e={entanglement_fidelity:.15g}, p={p:.15g}")
    return DepolarizingParams(d, p)


def twirled_channel(ch: QuantumChannel) -> QuantumChannel:
    params = exact_twirl(ch)
    return depolarizing(params.dim, params.p)
