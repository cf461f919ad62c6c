"""
Compositeurs de référence GoCoMo-like et CoopC-like.
"""

from .backward_chaining import (
    BackwardChainingComposer,
    BackwardPlanFragment,
    BaselineConfig,
    Candidate,
    CoopCComposer,
    GoCoMoComposer,
    coopc_compose,
    gocomo_compose,
    order_plan,
)

__all__ = [
    'BackwardChainingComposer',
    'BackwardPlanFragment',
    'BaselineConfig',
    'Candidate',
    'CoopCComposer',
    'GoCoMoComposer',
    'coopc_compose',
    'gocomo_compose',
    'order_plan',
]
