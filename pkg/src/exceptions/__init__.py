"""
Package des exceptions du simulateur.
"""

from .composition_exceptions import (
    AgentError,
    BehaviorNetworkError,
    CatalogError,
    CompositionSimError,
    ConfigurationError,
    FileError,
    MetricsError,
    PerceptionError,
    PlanningError,
    ServiceModelError,
    SimulationComplete,
    SimulationError,
    SlipnetError,
)

__all__ = [
    'AgentError',
    'BehaviorNetworkError',
    'CatalogError',
    'CompositionSimError',
    'ConfigurationError',
    'FileError',
    'MetricsError',
    'PerceptionError',
    'PlanningError',
    'ServiceModelError',
    'SimulationComplete',
    'SimulationError',
    'SlipnetError',
]
