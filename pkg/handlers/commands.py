import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from avgfid import __version__
from avgfid.config import SpecLoader
from avgfid.documents import SpecValidationError
from core.basis import pauli_basis, shift_clock_basis
from core.channels import choi_distance, choi_state, depolarizing, exact_twirl
from core.errors import DimensionMismatchError
from core.fidelity import entanglement_fidelity
from core.linalg import dagger, max_deviation
from core.models import UnitaryOperatorBasis
from core.montecarlo import mc_twirl_choi
from estimators import ComputeRequest, EstimatorRegistry, MissingOptionError, create_registry
from utils.report import ReportDocument

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[..., ReportDocument]] = {}


def command(name: str):
    def decorator(fn: Callable[..., ReportDocument]) -> Callable[..., ReportDocument]:
        COMMANDS[name] = fn
        return fn

    return decorator


@dataclass
class RunOptions:
    basis: str = "shiftclock"
    samples: Optional[int] = None
    shots: Optional[int] = None
    repeats: Optional[int] = None
    seed: Optional[int] = None
    unitaries: Optional[int] = None
    workers: Optional[int] = None
    timing: bool = False


def operator_basis(name: str, dim: int) -> UnitaryOperatorBasis:
    if name == "shiftclock":
        return shift_clock_basis(dim)
    if name == "pauli":
        if dim != 2:
            raise DimensionMismatchError(f"the Pauli basis needs d = 2, channel acts on dimension {dim}")
        return pauli_basis()
    raise ValueError(f"Unknown operator basis: {name}")


def _finish(report: ReportDocument, started: float, timing: bool) -> ReportDocument:
    duration = time.perf_counter() - started
    logger.info(f"{report.command} finished in {duration:.3f}s")
    if timing:
        report.duration_seconds = duration
    return report


@command("compute")
def run_compute(
    channel_file: str,
    gate_file: str,
    method: str,
    options: Optional[RunOptions] = None,
    registry: Optional[EstimatorRegistry] = None,
) -> ReportDocument:
    started = time.perf_counter()
    options = options or RunOptions()
    registry = registry or create_registry()
    loader = SpecLoader()

    channel_doc = loader.load_channel(channel_file)
    gate_doc = loader.load_gate(gate_file)
    if gate_doc.dim != channel_doc.dim:
        raise SpecValidationError(f"gate dimension {gate_doc.dim} does not match channel dimension {channel_doc.dim}")

    channel = channel_doc.resolve()
    request = ComputeRequest(
        channel=channel,
        gate=gate_doc.resolve(),
        basis=operator_basis(options.basis, channel.dim),
        samples=options.samples,
        shots=options.shots,
        repeats=options.repeats,
        seed=options.seed,
        workers=options.workers,
    )
    results = registry.run(method, request)

    report = ReportDocument(
        command="compute",
        version=__version__,
        method=method,
        channel=channel_doc.fingerprint(),
        gate=gate_doc.fingerprint(),
        parameters={"basis": options.basis, **registry.get(method).parameters(request)},
        results=results,
    )
    return _finish(report, started, options.timing)


@command("twirl")
def run_twirl(channel_file: str, options: Optional[RunOptions] = None) -> ReportDocument:
    started = time.perf_counter()
    options = options or RunOptions()
    channel_doc = SpecLoader().load_channel(channel_file)
    channel = channel_doc.resolve()

    params = exact_twirl(channel)
    results = {"exact_twirl": {"p": params.p, "entanglement_fidelity": entanglement_fidelity(channel, "choi").value}}
    parameters = {}

    if options.unitaries is not None:
        if options.seed is None:
            raise MissingOptionError("--unitaries requires --seed")
        empirical = mc_twirl_choi(channel, options.unitaries, options.seed, options.workers)
        distance = choi_distance(empirical, choi_state(depolarizing(channel.dim, params.p)))
        logger.info(f"Empirical twirl over {options.unitaries} unitaries: Choi distance {distance:.3e}")
        parameters = {"unitaries": options.unitaries, "seed": options.seed}
        results["empirical_twirl"] = {"choi_distance": distance}

    report = ReportDocument(command="twirl", version=__version__, channel=channel_doc.fingerprint(), parameters=parameters, results=results)
    return _finish(report, started, options.timing)


@command("validate")
def run_validate(channel_file: str, options: Optional[RunOptions] = None) -> ReportDocument:
    started = time.perf_counter()
    options = options or RunOptions()
    channel_doc = SpecLoader().load_channel(channel_file)
    channel = channel_doc.resolve()

    completeness = sum(dagger(k) @ k for k in channel.kraus_ops)
    results = {
        "valid": True,
        "kraus_rank": channel.rank,
        "trace_preservation_error": max_deviation(completeness, np.eye(channel.dim)),
    }
    report = ReportDocument(command="validate", version=__version__, channel=channel_doc.fingerprint(), results=results)
    return _finish(report, started, options.timing)
