"""
Mesure structurelle de la mémoire vive de composition.

La taille est un décompte déterministe d'octets selon un schéma fixe, et non
la mémoire résidente du processus:

    conteneur vide             64 octets (six conteneurs)
    prémisse                   16 + len(prédicat) + Σ (8 + len(argument))
    élément de mémoire de travail  prémisse + 8 (force) + 8 par instant d'accès
    emplacement SDM touché     n + n/8 (compteurs int8 et adresse compactée)
    comportement               8 (activation)
    nœud de slipnet actif      8 (activation)
    fragment de plan           16 + Σ prémisses
    entrée de plan             16 + len(identifiant) + Σ prémisses
"""

from typing import Dict, Iterable, List, Sequence, Tuple
from dataclasses import dataclass, field
import logging

from ..services.service_model import Premise

logger = logging.getLogger(__name__)

CONTAINER_BYTES = 64
CONTAINERS = ('wm', 'sdm', 'bn', 'slipnet', 'fragments', 'plan')
ACTIVATION_BYTES = 8
ENTRY_OVERHEAD = 16
KILOBYTE = 1024.0


def premise_bytes(premise: Premise) -> int:
    return 16 + len(premise.predicate) + sum(8 + len(arg) for arg in premise.args)


@dataclass
class LiveState:
    """Vue structurelle de l'état vif d'un compositeur."""
    # (prémisse, nombre d'instants d'accès)
    wm_items: List[Tuple[Premise, int]] = field(default_factory=list)
    sdm_touched: int = 0
    sdm_dimension: int = 0
    bn_behaviors: int = 0
    slipnet_active: int = 0
    fragments: List[Sequence[Premise]] = field(default_factory=list)
    plan: List[Tuple[str, Sequence[Premise]]] = field(default_factory=list)


def state_bytes(state: LiveState) -> Dict[str, int]:
    """Octets par conteneur."""
    return {
        'wm': CONTAINER_BYTES + sum(premise_bytes(p) + 8 + 8 * accesses for p, accesses in state.wm_items),
        'sdm': CONTAINER_BYTES + state.sdm_touched * (state.sdm_dimension + state.sdm_dimension // 8),
        'bn': CONTAINER_BYTES + ACTIVATION_BYTES * state.bn_behaviors,
        'slipnet': CONTAINER_BYTES + ACTIVATION_BYTES * state.slipnet_active,
        'fragments': CONTAINER_BYTES + sum(
            ENTRY_OVERHEAD + sum(premise_bytes(p) for p in fragment) for fragment in state.fragments
        ),
        'plan': CONTAINER_BYTES + sum(
            ENTRY_OVERHEAD + len(service_id) + sum(premise_bytes(p) for p in items)
            for service_id, items in state.plan
        ),
    }


def measure_memory(state: LiveState) -> float:
    """Taille de l'état vif en kilo-octets."""
    return sum(state_bytes(state).values()) / KILOBYTE


@dataclass
class MemorySampler:
    """Échantillons de mémoire d'une requête: pic et moyenne."""
    samples: List[float] = field(default_factory=list)

    def add(self, kilobytes: float) -> None:
        self.samples.append(kilobytes)

    def extend(self, values: Iterable[float]) -> None:
        self.samples.extend(values)

    @property
    def peak(self) -> float:
        return max(self.samples, default=0.0)

    @property
    def mean(self) -> float:
        if not self.samples:
            return 0.0
        return sum(self.samples) / len(self.samples)
