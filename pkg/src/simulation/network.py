"""
Modèle radio minimal: graphe à disque unitaire, routage au plus court chemin
et inondation limitée par TTL.
"""

from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple
from dataclasses import dataclass, field
from collections import deque
import logging

import numpy as np

from .mobility import SimNode

logger = logging.getLogger(__name__)

ADVERT = 'advert'
DISCOVERY = 'discovery'
INVOKE = 'invoke'
RESPONSE = 'response'
MESSAGE_KINDS = (ADVERT, DISCOVERY, INVOKE, RESPONSE)


@dataclass
class NetMessage:
    """Message réseau; `path` est la route choisie à l'émission."""
    src: str
    dst: str
    kind: str
    size: int
    send_time: float
    payload: Dict[str, Any] = field(default_factory=dict)
    path: Tuple[str, ...] = ()

    @property
    def hops(self) -> int:
        return max(len(self.path) - 1, 0)


@dataclass(frozen=True)
class RadioModel:
    """Paramètres radio: portée, latence par saut, débit et TTL de découverte."""
    radio_range: float = 100.0
    hop_latency: float = 0.010
    bandwidth_bps: float = 1_000_000.0
    ttl: int = 3

    def latency(self, hops: int, size: int) -> float:
        """Latence de bout en bout: par saut, 10 ms plus la transmission."""
        return hops * (self.hop_latency + size * 8.0 / self.bandwidth_bps)


def adjacency(nodes: Sequence[SimNode], radio_range: float) -> Dict[str, List[str]]:
    """Voisins à portée radio de chaque nœud, triés par identifiant."""
    ids = [node.id for node in nodes]
    if not nodes:
        return {}
    points = np.array([node.position for node in nodes], dtype=float)
    diff = points[:, None, :] - points[None, :, :]
    within = (diff ** 2).sum(axis=2) <= radio_range ** 2
    np.fill_diagonal(within, False)
    return {
        ids[i]: sorted(ids[j] for j in np.flatnonzero(within[i]))
        for i in range(len(ids))
    }


def hop_counts(adj: Mapping[str, Sequence[str]], source: str, max_hops: Optional[int] = None) -> Dict[str, int]:
    """Nombre de sauts depuis `source` (parcours en largeur, au plus `max_hops`)."""
    hops = {source: 0}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        if max_hops is not None and hops[current] >= max_hops:
            continue
        for neighbor in adj.get(current, ()):
            if neighbor not in hops:
                hops[neighbor] = hops[current] + 1
                queue.append(neighbor)
    return hops


def shortest_path(adj: Mapping[str, Sequence[str]], source: str, target: str) -> Optional[Tuple[str, ...]]:
    """Plus court chemin déterministe (voisins visités dans l'ordre trié)."""
    if source == target:
        return (source,)
    parents: Dict[str, Optional[str]] = {source: None}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        for neighbor in adj.get(current, ()):
            if neighbor in parents:
                continue
            parents[neighbor] = current
            if neighbor == target:
                path = [target]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])  # type: ignore[arg-type]
                return tuple(reversed(path))
            queue.append(neighbor)
    return None


def path_intact(adj: Mapping[str, Sequence[str]], path: Sequence[str]) -> bool:
    """Vrai si chaque saut de la route est encore à portée."""
    return all(b in adj.get(a, ()) for a, b in zip(path, path[1:]))
