"""
Nœuds mobiles et modèle de mobilité « random waypoint ».
"""

from typing import Dict, List, Optional, Set, Tuple
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ..exceptions.composition_exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Bandes de vitesse (m/s); `static` sert aux scénarios sans mobilité
MOBILITY_BANDS: Dict[str, Tuple[float, float]] = {
    'static': (0.0, 0.0),
    'M-S': (0.0, 2.0),
    'M-M': (2.0, 8.0),
    'M-F': (8.0, 13.0),
}

REQUESTER = 'requester'
PROVIDER = 'provider'


def speed_band(name: str) -> Tuple[float, float]:
    if name not in MOBILITY_BANDS:
        raise ConfigurationError(f"Bande de mobilité inconnue: {name}", key='experiment.mobilities')
    return MOBILITY_BANDS[name]


@dataclass
class SimNode:
    """Nœud du réseau ad hoc."""
    id: str
    x: float
    y: float
    waypoint: Tuple[float, float]
    speed: float
    radio_range: float = 100.0
    roles: Set[str] = field(default_factory=set)
    hosted: List[str] = field(default_factory=list)

    @property
    def position(self) -> Tuple[float, float]:
        return (self.x, self.y)

    def is_requester(self) -> bool:
        return REQUESTER in self.roles

    def is_provider(self) -> bool:
        return PROVIDER in self.roles


def draw_speed(band: Tuple[float, float], rng: np.random.Generator) -> float:
    low, high = band
    if high <= low:
        return low
    return float(rng.uniform(low, high))


def draw_point(arena: Tuple[float, float], rng: np.random.Generator) -> Tuple[float, float]:
    return (float(rng.uniform(0.0, arena[0])), float(rng.uniform(0.0, arena[1])))


def move_random_waypoint(
    node: SimNode,
    dt: float,
    arena: Tuple[float, float],
    band: Tuple[float, float],
    rng: np.random.Generator,
) -> SimNode:
    """
    Fait avancer un nœud vers son point de passage pendant `dt` secondes.

    À l'arrivée, le nœud tire un nouveau point uniforme dans l'arène et une
    nouvelle vitesse uniforme dans la bande (sans temps de pause).

    Raises:
        ConfigurationError: Si `dt` n'est pas strictement positif
    """
    if dt <= 0:
        raise ConfigurationError(f"Pas de temps invalide: {dt}", key='simulation.move_period')
    wx, wy = node.waypoint
    dx, dy = wx - node.x, wy - node.y
    remaining = math.hypot(dx, dy)
    step = node.speed * dt
    if step <= 0:
        return node
    if step >= remaining:
        node.x, node.y = wx, wy
        node.waypoint = draw_point(arena, rng)
        node.speed = draw_speed(band, rng)
    else:
        node.x += dx / remaining * step
        node.y += dy / remaining * step
    node.x = min(max(node.x, 0.0), arena[0])
    node.y = min(max(node.y, 0.0), arena[1])
    return node


def create_nodes(
    count: int,
    requesters: int,
    arena: Tuple[float, float],
    band: Tuple[float, float],
    radio_range: float,
    rng: np.random.Generator,
    positions: Optional[List[Tuple[float, float]]] = None,
) -> List[SimNode]:
    """
    Crée `count` nœuds; les `requesters` premiers sont demandeurs, les autres fournisseurs.
    """
    if count < 1 or not 0 <= requesters < count:
        raise ConfigurationError(f"Nombre de nœuds invalide: {count} ({requesters} demandeurs)", key='simulation.nodes')
    nodes = []
    for index in range(count):
        x, y = positions[index] if positions else draw_point(arena, rng)
        role = REQUESTER if index < requesters else PROVIDER
        nodes.append(SimNode(
            id=f"n{index:03d}",
            x=x,
            y=y,
            waypoint=draw_point(arena, rng),
            speed=draw_speed(band, rng),
            radio_range=radio_range,
            roles={role},
        ))
    return nodes


def zone_of(node: SimNode, arena: Tuple[float, float]) -> str:
    """Quadrant de l'arène (`q0` à `q3`) où se trouve le nœud."""
    column = 1 if node.x >= arena[0] / 2 else 0
    row = 1 if node.y >= arena[1] / 2 else 0
    return f"q{row * 2 + column}"
