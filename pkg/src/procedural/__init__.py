"""
Mémoire procédurale: régimes heuristiques et découverte par QoS.
"""

from .procedural_memory import (
    GOAL_ORIENTED,
    PLAN_BIASED,
    REACTIVE_DELIBERATIVE,
    ProceduralMemory,
    Regime,
    default_regimes,
    discover_concrete,
    preferred_dimensions,
    regimes_from_settings,
    select_regime,
    update_utility,
)

__all__ = [
    'GOAL_ORIENTED',
    'PLAN_BIASED',
    'REACTIVE_DELIBERATIVE',
    'ProceduralMemory',
    'Regime',
    'default_regimes',
    'discover_concrete',
    'preferred_dimensions',
    'regimes_from_settings',
    'select_regime',
    'update_utility',
]
