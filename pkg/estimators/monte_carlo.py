from typing import Any, Dict

from core.montecarlo import mc_average_gate_fidelity
from estimators.base import ComputeRequest, Estimator


class MonteCarloEstimator(Estimator):
    name = "mc"
    required_options = ("samples", "seed")

    def estimate(self, request: ComputeRequest) -> Dict[str, Any]:
        estimate = mc_average_gate_fidelity(request.channel, request.gate, request.samples, request.seed, request.workers)
        return {"gate_fidelity": estimate.to_dict()}
