import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.models import QuantumChannel, UnitaryOperatorBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ComputeRequest:
    channel: QuantumChannel
    gate: np.ndarray
    basis: UnitaryOperatorBasis
    samples: Optional[int] = None
    shots: Optional[int] = None
    repeats: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None


class MissingOptionError(ValueError):
    pass


class Estimator(ABC):
    name: str = ""  # Subclasses must override this
    required_options: Tuple[str, ...] = ()

    @abstractmethod
    def estimate(self, request: ComputeRequest) -> Dict[str, Any]:
        pass

    def parameters(self, request: ComputeRequest) -> Dict[str, Any]:
        return {option: getattr(request, option) for option in self.required_options}


class EstimatorRegistry:
    def __init__(self):
        self.estimators: Dict[str, Estimator] = {}

    def register(self, name: str, estimator: Estimator):
        self.estimators[name] = estimator
        logger.debug(f"Registered estimator: {name}")

    def get(self, name: str) -> Estimator:
        if name not in self.estimators:
            raise KeyError(f"Estimator not found: {name} (available: {', '.join(sorted(self.estimators))})")
        return self.estimators[name]

    def run(self, name: str, request: ComputeRequest) -> Dict[str, Any]:
        estimator = self.get(name)
        missing = [option for option in estimator.required_options if getattr(request, option) is None]
        if missing:
            raise MissingOptionError(f"method '{name}' requires {', '.join('--' + m for m in missing)}")
        logger.debug(f"Running estimator: {name} with {estimator.parameters(request)}")
        return estimator.estimate(request)
