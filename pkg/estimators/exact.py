import logging
from typing import Any, Dict

from core.channels import compose, unitary_channel
from core.fidelity import average_fidelity, average_gate_fidelity, average_gate_fidelity_qubit, entanglement_fidelity
from core.linalg import dagger
from estimators.base import ComputeRequest, Estimator

logger = logging.getLogger(__name__)


class ExactEstimator(Estimator):
    name = "exact"

    def estimate(self, request: ComputeRequest) -> Dict[str, Any]:
        ch = request.channel
        gate_fidelity = average_gate_fidelity(ch, request.gate, request.basis)
        # F_e and the Horodecki value refer to the error channel U†∘E
        error_channel = compose(ch, unitary_channel(dagger(request.gate)))
        results = {
            "gate_fidelity": gate_fidelity.to_dict(),
            "entanglement_fidelity": entanglement_fidelity(error_channel, "choi").to_dict(),
            "average_fidelity": average_fidelity(error_channel).to_dict(),
        }
        if ch.dim == 2:
            results["qubit_closed_form"] = average_gate_fidelity_qubit(ch, request.gate).to_dict()
        logger.info(f"Exact gate fidelity: {gate_fidelity.value:.15g}")
        return results
