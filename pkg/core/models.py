import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import svdvals

from core.errors import DimensionMismatchError, InvalidBasisError, InvalidChannelError, InvalidStateError, ParameterRangeError
from core.linalg import IDENTITY_TOL, STRUCTURE_TOL, as_matrix, dagger, frozen, max_deviation, vec_row

# Linear independence threshold for preparation states
GRAM_TOL = 1e-8

BasisLabel = Union[Tuple[int, int], str]


def _outside_unit_interval(x: float) -> bool:
    # rounding-level excursions are not flagged
    return not (-STRUCTURE_TOL <= x <= 1 + STRUCTURE_TOL)


def _clamp_unit(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size == 0 or not np.all(np.isfinite(amplitudes)):
            raise InvalidStateError("pure state needs a finite, non-empty amplitude vector")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1) > IDENTITY_TOL:
            raise InvalidStateError(f"pure state is not normalized: |psi| = {norm!r}")
        amplitudes.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_vector(cls, vector) -> "PureState":
        vector = np.asarray(vector, dtype=np.complex128).reshape(-1)
        return cls(vector / np.linalg.norm(vector))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    tolerance: float = field(default=STRUCTURE_TOL, repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        hermiticity = max_deviation(m, dagger(m))
        if hermiticity > self.tolerance:
            raise InvalidStateError(f"density matrix is not Hermitian: max |M - M†| = {hermiticity:.3e}")
        trace = complex(np.trace(m))
        if abs(trace - 1) > self.tolerance:
            raise InvalidStateError(f"density matrix trace is {trace.real:.12f}, expected 1")
        smallest = float(np.linalg.eigvalsh((m + dagger(m)) / 2)[0])
        if smallest < -self.tolerance:
            raise InvalidStateError(f"density matrix is not positive semidefinite: smallest eigenvalue {smallest:.3e}")
        object.__setattr__(self, "matrix", frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryOperatorBasis:
    """d² operators; invariants are checked by ``core.basis.validate_basis``, not here."""

    elements: Tuple[np.ndarray, ...]
    labels: Tuple[BasisLabel, ...]

    def __post_init__(self):
        elements = tuple(frozen(as_matrix(e, "basis element")) for e in self.elements)
        if not elements:
            raise InvalidBasisError("operator basis needs at least one element")
        dim = elements[0].shape[0]
        for i, element in enumerate(elements):
            if element.shape != (dim, dim):
                raise DimensionMismatchError(f"basis element {i} has shape {element.shape}, expected {(dim, dim)}")
        if len(self.labels) != len(elements):
            raise InvalidBasisError(f"{len(self.labels)} labels for {len(elements)} basis elements")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def stack(self) -> np.ndarray:
        return np.stack(self.elements)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Trace-preserving completely positive map in Kraus form."""

    kraus_ops: Tuple[np.ndarray, ...]
    tolerance: float = field(default=STRUCTURE_TOL, repr=False)

    def __post_init__(self):
        ops = tuple(frozen(as_matrix(k, "Kraus operator")) for k in self.kraus_ops)
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        for i, k in enumerate(ops):
            if k.shape != (dim, dim):
                raise DimensionMismatchError(f"Kraus operator {i} has shape {k.shape}, expected {(dim, dim)}")
        completeness = sum(dagger(k) @ k for k in ops)
        deviation = max_deviation(completeness, np.eye(dim))
        if deviation > self.tolerance:
            raise InvalidChannelError(f"Kraus operators are not trace preserving: max |sum K†K - I| = {deviation:.3e}")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def rank(self) -> int:
        return len(self.kraus_ops)

    def stack(self) -> np.ndarray:
        return np.stack(self.kraus_ops)


@dataclass(frozen=True)
class DepolarizingParams:
    dim: int
    p: float

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterRangeError(f"dimension must be positive, got {self.dim}")
        upper = self.upper_bound(self.dim)
        if not (-STRUCTURE_TOL <= self.p <= upper + STRUCTURE_TOL):
            raise ParameterRangeError(f"depolarizing p={self.p!r} outside [0, {upper!r}] for d={self.dim}")
        object.__setattr__(self, "p", float(min(max(self.p, 0.0), upper)))

    @staticmethod
    def upper_bound(dim: int) -> float:
        # complete positivity limit of pI/d + (1-p)rho
        return math.inf if dim == 1 else dim * dim / (dim * dim - 1)


class FidelityMethod(str, Enum):
    CHOI = "choi"
    BASIS_SUM = "basis-sum"
    HORODECKI = "horodecki"
    GATE_FORMULA = "gate-formula"
    QUBIT_CLOSED_FORM = "qubit-closed-form"
    STATE_BASIS = "state-basis"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class FidelityValue:
    value: float
    method: FidelityMethod

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        # plug-in estimates from finite-shot tomography may leave [0, 1]
        if self.method is not FidelityMethod.STATE_BASIS and not (-STRUCTURE_TOL <= self.value <= 1 + STRUCTURE_TOL):
            raise ParameterRangeError(f"{self.method.value} fidelity {self.value!r} outside [0, 1]")

    @property
    def clamped(self) -> bool:
        return _outside_unit_interval(self.value)

    @property
    def reported(self) -> float:
        return _clamp_unit(self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.reported, "raw": self.value, "clamped": self.clamped, "method": self.method.value}


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ParameterRangeError(f"n_samples must be positive, got {self.n_samples}")
        if self.std_error < 0:
            raise ParameterRangeError(f"std_error must be non-negative, got {self.std_error}")

    @classmethod
    def from_samples(cls, samples: Sequence[float], seed: int) -> "McEstimate":
        values = np.asarray(samples, dtype=float)
        n = values.size
        std_error = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        return cls(mean=float(np.mean(values)), std_error=std_error, n_samples=n, seed=seed)

    def z_score(self, reference: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean == reference else math.inf
        return (self.mean - reference) / self.std_error

    @property
    def clamped(self) -> bool:
        return _outside_unit_interval(self.mean)

    @property
    def reported(self) -> float:
        return _clamp_unit(self.mean)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.reported,
            "raw": self.mean,
            "clamped": self.clamped,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class PreparationBasis:
    states: Tuple[PureState, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise InvalidBasisError("preparation basis needs states")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise DimensionMismatchError("preparation states have mixed dimensions")
        if len(states) != dim * dim:
            raise InvalidBasisError(f"preparation basis needs {dim * dim} states, got {len(states)}")
        object.__setattr__(self, "states", states)
        smallest = self.smallest_gram_singular_value()
        if smallest <= GRAM_TOL:
            raise InvalidBasisError(f"preparation states are linearly dependent: smallest Gram singular value {smallest:.3e}")

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def projectors(self) -> Tuple[np.ndarray, ...]:
        return tuple(s.projector() for s in self.states)

    def operator_matrix(self) -> np.ndarray:
        """Columns are the row-major vectorized projectors rho_k."""
        return np.stack([vec_row(p) for p in self.projectors()], axis=1)

    def smallest_gram_singular_value(self) -> float:
        m = self.operator_matrix()
        return float(svdvals(dagger(m) @ m)[-1])


@dataclass(frozen=True, eq=False)
class AlphaMatrix:
    """Coefficients with U_j = sum_k alpha[j, k] rho_k."""

    entries: np.ndarray

    def __post_init__(self):
        entries = as_matrix(self.entries, "alpha matrix")
        if entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"alpha matrix must be square, got {entries.shape}")
        object.__setattr__(self, "entries", frozen(entries))

    @property
    def dim(self) -> int:
        return math.isqrt(self.entries.shape[0])

    def reconstruction_residual(self, basis: UnitaryOperatorBasis, preparation: PreparationBasis) -> float:
        rhos = np.stack(preparation.projectors())
        reconstructed = np.einsum("jk,kab->jab", self.entries, rhos)
        return float(np.max(np.abs(reconstructed - basis.stack())))


@dataclass(frozen=True, eq=False)
class TomographyResult:
    estimates: Tuple[np.ndarray, ...]
    shots_per_setting: int
    seed: int
    exact: bool = False

    def __post_init__(self):
        estimates = tuple(frozen(as_matrix(e, "tomographic estimate")) for e in self.estimates)
        for k, e in enumerate(estimates):
            if max_deviation(e, dagger(e)) > IDENTITY_TOL:
                raise InvalidStateError(f"estimate {k} is not Hermitian")
            if abs(np.trace(e) - 1) > IDENTITY_TOL:
                raise InvalidStateError(f"estimate {k} does not have unit trace")
        if self.shots_per_setting < 1:
            raise ParameterRangeError(f"shots must be positive, got {self.shots_per_setting}")
        object.__setattr__(self, "estimates", estimates)

    def min_eigenvalues(self) -> np.ndarray:
        return np.array([np.linalg.eigvalsh(e)[0] for e in self.estimates])


def as_operator(value: Union[np.ndarray, DensityMatrix]) -> np.ndarray:
    if isinstance(value, DensityMatrix):
        return value.matrix
    return np.asarray(value, dtype=np.complex128)
