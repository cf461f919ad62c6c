"""
Mémoire de travail à capacité limitée et à déclin par récence.

La rétention d'un élément est gouvernée par son activation de base
B = ln(Σ (t - t_j)^-d) calculée sur ses instants d'accès. Les prémisses
rappelées par les mémoires déclaratives sont marquées `declarative` et
cèdent leur place aux percepts.
"""

from typing import Dict, FrozenSet, Iterable, List, Optional
from dataclasses import dataclass, field
import logging
import math

from ..exceptions.composition_exceptions import ConfigurationError
from ..services.service_model import Premise

logger = logging.getLogger(__name__)

AGE_EPSILON = 1e-6

PERCEPT_SOURCE = 'percept'
DECLARATIVE_SOURCE = 'declarative'
OUTCOME_SOURCE = 'outcome'


@dataclass
class WMItem:
    """Élément de la mémoire de travail."""
    premise: Premise
    access_times: List[float]
    injection_strength: float = 1.0
    source: str = PERCEPT_SOURCE

    @property
    def last_access(self) -> float:
        return self.access_times[-1]


def base_level_activation(item: WMItem, t_now: float, decay: float = 0.5) -> float:
    """
    Activation de base d'un élément à l'instant `t_now`.

    Un âge nul est remplacé par 1e-6 s pour éviter la singularité.
    """
    total = 0.0
    for access in item.access_times:
        age = max(t_now - access, 0.0) or AGE_EPSILON
        total += age ** (-decay)
    return math.log(total)


@dataclass
class WorkingMemory:
    """
    Mémoire de travail de l'agent.

    Args:
        capacity: Nombre maximal d'éléments K
        decay: Taux de déclin d, dans (0,1)
        threshold: Seuil de rétention τ sur l'activation de base
        history: Nombre maximal d'instants d'accès conservés par élément (None: tous)
    """
    capacity: int = 12
    decay: float = 0.5
    threshold: float = -2.0
    history: Optional[int] = None
    items: Dict[Premise, WMItem] = field(default_factory=dict)

    def __post_init__(self):
        if self.capacity < 1:
            raise ConfigurationError(f"Capacité invalide: {self.capacity}", key='working_memory.capacity')
        if not 0.0 < self.decay < 1.0:
            raise ConfigurationError(f"Déclin hors de (0,1): {self.decay}", key='working_memory.decay')

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, premise: object) -> bool:
        return premise in self.items

    def activation(self, premise: Premise, t_now: float) -> float:
        """Activation de base d'une prémisse stockée (-inf si absente)."""
        item = self.items.get(premise)
        if item is None:
            return -math.inf
        return base_level_activation(item, t_now, self.decay)

    def inject(
        self,
        premise: Premise,
        t_now: float,
        strength: float = 1.0,
        source: str = PERCEPT_SOURCE,
    ) -> Optional[Premise]:
        """
        Injecte ou rafraîchit une prémisse.

        Returns:
            La prémisse évincée si la capacité a été dépassée, sinon None
        """
        item = self.items.get(premise)
        if item is not None:
            # un accès antérieur au dernier accès est ramené à ce dernier
            item.access_times.append(max(t_now, item.last_access))
            if self.history is not None and len(item.access_times) > self.history:
                del item.access_times[:-self.history]
            item.injection_strength = max(item.injection_strength, strength)
            if source != DECLARATIVE_SOURCE:
                item.source = source
            return None

        self.items[premise] = WMItem(premise, [t_now], strength, source)
        if len(self.items) <= self.capacity:
            return None

        victim = self._victim(t_now)
        del self.items[victim.premise]
        logger.debug(f"Éviction de la mémoire de travail: {victim.premise}")
        return victim.premise

    def _victim(self, t_now: float) -> WMItem:
        """
        Élément évincé en cas de dépassement de capacité.

        Les rappels déclaratifs partent les premiers et n'occupent que la
        capacité libre: un rappel n'évince jamais un percept. Dans le groupe
        retenu, l'activation la plus faible est évincée; à égalité, l'accès le
        plus ancien, puis la prémisse lexicographiquement la plus grande.
        """
        pool = [item for item in self.items.values() if item.source == DECLARATIVE_SOURCE]
        if not pool:
            pool = list(self.items.values())
        scored = [((base_level_activation(item, t_now, self.decay), item.last_access), item) for item in pool]
        lowest = min(key for key, _ in scored)
        return max((item for key, item in scored if key == lowest), key=lambda item: item.premise)

    def inject_all(self, items: Iterable[Premise], t_now: float, strength: float = 1.0, source: str = PERCEPT_SOURCE) -> List[Premise]:
        evicted = []
        for premise in items:
            victim = self.inject(premise, t_now, strength, source)
            if victim is not None:
                evicted.append(victim)
        return evicted

    def discard(self, premise: Premise) -> bool:
        """Retire une prémisse (liste de suppression d'un service exécuté)."""
        return self.items.pop(premise, None) is not None

    def contents(self, t_now: float) -> List[Premise]:
        """
        Prémisses retenues à `t_now`, par activation décroissante.

        Seuls les éléments dont l'activation atteint le seuil τ sont retenus.
        """
        scored = [
            (base_level_activation(item, t_now, self.decay), item)
            for item in self.items.values()
        ]
        retained = [pair for pair in scored if pair[0] >= self.threshold]
        retained.sort(key=lambda pair: (-pair[0], pair[1].premise))
        return [item.premise for _, item in retained]

    def state(self, t_now: float) -> FrozenSet[Premise]:
        return frozenset(self.contents(t_now))

    def prune(self, t_now: float) -> int:
        """Supprime les éléments sous le seuil de rétention."""
        faded = [
            premise for premise, item in self.items.items()
            if base_level_activation(item, t_now, self.decay) < self.threshold
        ]
        for premise in faded:
            del self.items[premise]
        return len(faded)
