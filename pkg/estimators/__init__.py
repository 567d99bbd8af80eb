import importlib
import inspect
import logging
import pkgutil
from pathlib import Path
from typing import Dict, Optional, Type

from estimators.base import ComputeRequest, Estimator, EstimatorRegistry, MissingOptionError

logger = logging.getLogger(__name__)

_discovered_estimators: Dict[str, Type[Estimator]] = {}


def discover_estimators(package_path: Optional[str] = None) -> Dict[str, Type[Estimator]]:
    global _discovered_estimators

    if _discovered_estimators:
        return _discovered_estimators

    if package_path is None:
        package_path = str(Path(__file__).parent)

    found: Dict[str, Type[Estimator]] = {}

    for _, module_name, _ in pkgutil.iter_modules([package_path]):
        if module_name in ("__init__", "base"):
            continue

        module = importlib.import_module(f"estimators.{module_name}")
        for _, obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(obj, Estimator) and obj is not Estimator and obj.__module__ == module.__name__:
                if not obj.name:
                    logger.warning(f"Estimator {obj.__name__} has no 'name' attribute, skipping")
                    continue
                found[obj.name] = obj
                logger.debug(f"Discovered estimator: {obj.name} -> {obj.__name__}")

    _discovered_estimators = found
    return found


def create_registry() -> EstimatorRegistry:
    registry = EstimatorRegistry()
    for name, estimator_cls in discover_estimators().items():
        registry.register(name, estimator_cls())

    logger.debug(f"Loaded {len(registry.estimators)} estimators: {', '.join(sorted(registry.estimators))}")
    return registry


__all__ = ["ComputeRequest", "Estimator", "EstimatorRegistry", "MissingOptionError", "create_registry", "discover_estimators"]
