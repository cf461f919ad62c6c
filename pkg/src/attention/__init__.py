"""
Attention sélective par réseau de comportements.
"""

from .behavior_network import (
    Behavior,
    BehaviorNetwork,
    BNParams,
    SpreadFractions,
    activation_step,
    build_network,
    derive_links,
    select_behavior,
    trace_rows,
)

__all__ = [
    'Behavior',
    'BehaviorNetwork',
    'BNParams',
    'SpreadFractions',
    'activation_step',
    'build_network',
    'derive_links',
    'select_behavior',
    'trace_rows',
]
