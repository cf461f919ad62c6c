"""
Simulateur MANET à événements discrets et interface des compositeurs.
"""

from .composer import Composer, OpenRequest, RequestOutcome
from .mobility import (
    MOBILITY_BANDS,
    PROVIDER,
    REQUESTER,
    SimNode,
    create_nodes,
    move_random_waypoint,
    speed_band,
    zone_of,
)
from .network import ADVERT, DISCOVERY, INVOKE, RESPONSE, NetMessage, RadioModel
from .simulator import EventKind, ManetSimulator, SimEvent, SimulationConfig, deploy_services

__all__ = [
    'Composer',
    'OpenRequest',
    'RequestOutcome',
    'MOBILITY_BANDS',
    'PROVIDER',
    'REQUESTER',
    'SimNode',
    'create_nodes',
    'move_random_waypoint',
    'speed_band',
    'zone_of',
    'ADVERT',
    'DISCOVERY',
    'INVOKE',
    'RESPONSE',
    'NetMessage',
    'RadioModel',
    'EventKind',
    'ManetSimulator',
    'SimEvent',
    'SimulationConfig',
    'deploy_services',
]
