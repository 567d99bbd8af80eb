from typing import Any, Dict

from core.tomography import estimate_fidelity_experiment
from estimators.base import ComputeRequest, Estimator


class ExperimentEstimator(Estimator):
    """Finite-shot tomography of the preparation states plugged into the alpha formula."""

    name = "experiment"
    required_options = ("shots", "repeats", "seed")

    def estimate(self, request: ComputeRequest) -> Dict[str, Any]:
        estimate = estimate_fidelity_experiment(
            request.channel,
            request.gate,
            shots=request.shots,
            seed=request.seed,
            repeats=request.repeats,
            basis=request.basis,
            workers=request.workers,
        )
        return {"gate_fidelity": {**estimate.to_dict(), "shots": request.shots}}
