"""Schema of channel and gate spec files.

Complex numbers are ``[re, im]`` pairs of JSON numbers and matrices are row-major lists of rows; validation
is strict, so quoted numbers are schema violations. Structural problems (bad JSON, unknown ``type``,
wrong field types, d outside [2, 32]) raise :class:`SpecSyntaxError`; documents that parse but violate a
physical invariant (trace preservation, p range, unitarity, dimensions) raise :class:`SpecValidationError`.
"""

import hashlib
import json
import logging
from typing import Annotated, Any, Dict, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.linalg import eigh, polar

from core.basis import clock_operator, shift_operator
from core.channels import compose, depolarizing, random_channel, unitary_channel
from core.errors import FidelityError
from core.linalg import dagger, validate_unitary
from core.models import QuantumChannel

logger = logging.getLogger(__name__)

# Decimal serialization of matrices is only this accurate
SPEC_TOL = 1e-8
# Dense d x d storage everywhere; larger systems are out of scope
MAX_DIM = 32

Complex = Tuple[float, float]
Matrix = List[List[Complex]]


class SpecSyntaxError(ValueError):
    pass


class SpecValidationError(ValueError):
    pass


class SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, strict=True)


class KrausChannelSpec(SpecModel):
    type: Literal["kraus"]
    operators: List[Matrix] = Field(min_length=1)


class DepolarizingChannelSpec(SpecModel):
    type: Literal["depolarizing"]
    p: float


class UnitaryChannelSpec(SpecModel):
    type: Literal["unitary"]
    matrix: Matrix


class ComposeChannelSpec(SpecModel):
    type: Literal["compose"]
    first: "ChannelSpec"
    then: "ChannelSpec"


class RandomChannelSpec(SpecModel):
    type: Literal["random"]
    kraus_rank: int = Field(ge=1)
    seed: int = Field(ge=0)


ChannelSpec = Annotated[
    Union[KrausChannelSpec, DepolarizingChannelSpec, UnitaryChannelSpec, ComposeChannelSpec, RandomChannelSpec],
    Field(discriminator="type"),
]
ComposeChannelSpec.model_rebuild()


class ChannelSpecDocument(SpecModel):
    dim: int = Field(ge=2, le=MAX_DIM)
    channel: ChannelSpec

    def resolve(self) -> QuantumChannel:
        return _build_channel(self.channel, self.dim, "channel")

    def fingerprint(self) -> Dict[str, Any]:
        return {"dim": self.dim, "type": self.channel.type, "sha256": _content_hash(self)}


NamedGate = Literal["identity", "shift", "clock"]


class GateSpecDocument(SpecModel):
    dim: int = Field(ge=2, le=MAX_DIM)
    gate: Union[NamedGate, Matrix]

    def resolve(self) -> np.ndarray:
        if self.gate == "identity":
            return np.eye(self.dim, dtype=np.complex128)
        if self.gate == "shift":
            return shift_operator(self.dim)
        if self.gate == "clock":
            return clock_operator(self.dim)
        return _unitary_from_spec(self.gate, self.dim, "gate")

    def fingerprint(self) -> Dict[str, Any]:
        kind = self.gate if isinstance(self.gate, str) else "matrix"
        return {"dim": self.dim, "type": kind, "sha256": _content_hash(self)}


def _content_hash(document: SpecModel) -> str:
    canonical = json.dumps(document.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _to_array(matrix: Matrix, dim: int, path: str) -> np.ndarray:
    try:
        array = np.array([[complex(re, im) for re, im in row] for row in matrix], dtype=np.complex128)
    except ValueError as e:
        raise SpecValidationError(f"{path}: rows have unequal lengths") from e
    if array.shape != (dim, dim):
        raise SpecValidationError(f"{path}: expected a {dim}x{dim} matrix, got shape {array.shape}")
    return array


def _unitary_from_spec(matrix: Matrix, dim: int, path: str) -> np.ndarray:
    array = _to_array(matrix, dim, path)
    if not validate_unitary(array, SPEC_TOL):
        deviation = float(np.max(np.abs(dagger(array) @ array - np.eye(dim))))
        raise SpecValidationError(f"{path}: matrix is not unitary (max |U†U - I| = {deviation:.3e}, tolerance {SPEC_TOL:g})")
    # nearest unitary removes decimal rounding
    return polar(array)[0]


def _normalized_kraus(operators: List[np.ndarray]) -> Tuple[np.ndarray, ...]:
    completeness = sum(dagger(k) @ k for k in operators)
    eigenvalues, eigenvectors = eigh(completeness)
    inverse_sqrt = eigenvectors @ np.diag(eigenvalues**-0.5) @ dagger(eigenvectors)
    return tuple(k @ inverse_sqrt for k in operators)


def _build_channel(spec: ChannelSpec, dim: int, path: str) -> QuantumChannel:
    try:
        if isinstance(spec, KrausChannelSpec):
            operators = [_to_array(op, dim, f"{path}.operators[{i}]") for i, op in enumerate(spec.operators)]
            QuantumChannel(tuple(operators), tolerance=SPEC_TOL)
            return QuantumChannel(_normalized_kraus(operators))
        if isinstance(spec, DepolarizingChannelSpec):
            return depolarizing(dim, spec.p)
        if isinstance(spec, UnitaryChannelSpec):
            return unitary_channel(_unitary_from_spec(spec.matrix, dim, f"{path}.matrix"))
        if isinstance(spec, ComposeChannelSpec):
            return compose(_build_channel(spec.first, dim, f"{path}.first"), _build_channel(spec.then, dim, f"{path}.then"))
        return random_channel(dim, spec.kraus_rank, spec.seed)
    except FidelityError as e:
        raise SpecValidationError(f"{path}: {e}") from e


def _format_validation_error(error: ValidationError) -> str:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<document>"
        problems.append(f"{location}: {item['msg']}")
    return "; ".join(problems)


def _load_json(text: Union[bytes, str]) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except UnicodeDecodeError as e:
        raise SpecSyntaxError(f"Spec is not valid UTF-8: {e}") from e


def parse_channel_spec(text: Union[bytes, str]) -> ChannelSpecDocument:
    _load_json(text)
    try:
        document = ChannelSpecDocument.model_validate_json(text)
    except ValidationError as e:
        raise SpecSyntaxError(f"Malformed channel spec: {_format_validation_error(e)}") from e
    channel = document.resolve()
    logger.debug(f"Channel spec resolved: dim={channel.dim}, type={document.channel.type}, kraus rank={channel.rank}")
    return document


def parse_gate_spec(text: Union[bytes, str]) -> GateSpecDocument:
    _load_json(text)
    try:
        document = GateSpecDocument.model_validate_json(text)
    except ValidationError as e:
        raise SpecSyntaxError(f"Malformed gate spec: {_format_validation_error(e)}") from e
    document.resolve()
    return document


def serialize_spec(document: SpecModel) -> bytes:
    return (json.dumps(document.model_dump(mode="json"), indent=2) + "\n").encode("utf-8")
