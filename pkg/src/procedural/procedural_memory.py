"""
Mémoire procédurale: découverte des services concrets par QoS et choix du
régime de paramètres du réseau de comportements par apprentissage d'utilité.
"""

from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence
from dataclasses import dataclass, field
import logging

import numpy as np

from ..attention.behavior_network import BNParams
from ..exceptions.composition_exceptions import ConfigurationError
from ..services.catalog import PERFORMED_WELL, PREFERS, QOS_DIMENSIONS
from ..services.service_model import (
    AbstractService,
    ConcreteService,
    Premise,
    QoSCaps,
    QoSVector,
    QoSWeights,
    qos_score,
)

logger = logging.getLogger(__name__)

GOAL_ORIENTED = 'goal-oriented'
REACTIVE_DELIBERATIVE = 'reactive-deliberative'
PLAN_BIASED = 'plan-biased'

REGIME_CONSTRAINTS: Dict[str, Callable[[BNParams], bool]] = {
    GOAL_ORIENTED: lambda p: p.gamma > p.phi,
    REACTIVE_DELIBERATIVE: lambda p: p.phi > p.gamma and p.phi > p.theta,
    PLAN_BIASED: lambda p: p.phi > p.pi > p.gamma,
}

DEFAULT_REGIME_PARAMS: Dict[str, BNParams] = {
    GOAL_ORIENTED: BNParams(pi=20.0, theta=45.0, phi=20.0, gamma=70.0, delta=50.0),
    REACTIVE_DELIBERATIVE: BNParams(pi=20.0, theta=30.0, phi=60.0, gamma=35.0, delta=50.0),
    PLAN_BIASED: BNParams(pi=40.0, theta=45.0, phi=60.0, gamma=25.0, delta=50.0),
}


class Regime:
    """Régime nommé de paramètres, contraint par son équilibre heuristique."""

    def __init__(self, name: str, params: BNParams, utility: float = 0.0, plays: int = 0):
        if name not in REGIME_CONSTRAINTS:
            raise ConfigurationError(f"Régime inconnu: {name}", key='procedural_memory.regimes')
        self.name = name
        self.utility = utility
        self.plays = plays
        self._params = params
        self._check(params)

    def _check(self, params: BNParams) -> None:
        if not REGIME_CONSTRAINTS[self.name](params):
            raise ConfigurationError(
                f"Paramètres incompatibles avec le régime {self.name}: {params.as_dict()}",
                key=f"procedural_memory.regimes.{self.name}",
            )

    @property
    def params(self) -> BNParams:
        return self._params

    @params.setter
    def params(self, value: BNParams) -> None:
        self._check(value)
        self._params = value

    def as_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'utility': round(self.utility, 6),
            'plays': self.plays,
            'params': self.params.as_dict(),
        }

    def __repr__(self) -> str:
        return f"Regime({self.name!r}, utility={self.utility:.4f}, plays={self.plays})"


def default_regimes() -> List[Regime]:
    return [Regime(name, params) for name, params in DEFAULT_REGIME_PARAMS.items()]


def regimes_from_settings(section: Mapping[str, Mapping[str, float]]) -> List[Regime]:
    """Régimes dans l'ordre de déclaration de la configuration."""
    return [Regime(name, BNParams(**values)) for name, values in section.items()]


def select_regime(regimes: Sequence[Regime], epsilon: float, rng: np.random.Generator) -> Regime:
    """
    Sélection ε-gloutonne d'un régime.

    Avec probabilité 1-ε le régime d'utilité maximale (premier déclaré en cas
    d'égalité), sinon un tirage uniforme parmi les autres.
    """
    if not regimes:
        raise ConfigurationError("Aucun régime déclaré", key='procedural_memory.regimes')
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigurationError(f"ε hors de [0,1]: {epsilon}", key='procedural_memory.epsilon')
    best_index = max(range(len(regimes)), key=lambda i: (regimes[i].utility, -i))
    explore = rng.random() < epsilon
    rest = [regime for i, regime in enumerate(regimes) if i != best_index]
    if explore and rest:
        return rest[int(rng.integers(len(rest)))]
    return regimes[best_index]


def update_utility(regime: Regime, reward: float, rate: float) -> Regime:
    """Mise à jour d'utilité: u ← u + α_u·(r − u)."""
    if not 0.0 < rate <= 1.0:
        raise ConfigurationError(f"Taux d'apprentissage hors de (0,1]: {rate}", key='procedural_memory.learning_rate')
    regime.utility += rate * (reward - regime.utility)
    regime.plays += 1
    return regime


def preferred_dimensions(wm_premises: Iterable[Premise]) -> List[str]:
    return sorted({
        p.args[0] for p in wm_premises
        if p.predicate == PREFERS and p.args and p.args[0] in QOS_DIMENSIONS
    })


def discover_concrete(
    abstract: AbstractService,
    live: Iterable[ConcreteService],
    weights: QoSWeights = QoSWeights(),
    caps: QoSCaps = QoSCaps(),
    wm_premises: Iterable[Premise] = (),
    episodic_bonus: float = 0.1,
    observed: Optional[Mapping[str, QoSVector]] = None,
) -> List[ConcreteService]:
    """
    Classe les membres joignables d'un service abstrait par score QoS.

    Les services ayant une prémisse `performed-well` en mémoire de travail
    reçoivent un bonus (score plafonné à 1); la dernière QoS observée
    remplace la QoS annoncée lorsqu'elle existe.

    Returns:
        Liste ordonnée par score décroissant puis identifiant (vide si aucun membre joignable)
    """
    members = set(abstract.members)
    observed = observed or {}
    well = {p.args[0] for p in wm_premises if p.predicate == PERFORMED_WELL and p.args}
    scored = []
    for service in live:
        if service.id not in members:
            continue
        score = qos_score(observed.get(service.id, service.qos), weights, caps)
        if service.id in well:
            score = min(score + episodic_bonus, 1.0)
        scored.append((-score, service.id, service))
    scored.sort(key=lambda entry: (entry[0], entry[1]))
    return [service for _, _, service in scored]


@dataclass
class ProceduralMemory:
    """Régimes, apprentissage d'utilité et paramètres de découverte d'un agent."""
    regimes: List[Regime] = field(default_factory=default_regimes)
    epsilon: float = 0.1
    learning_rate: float = 0.1
    episodic_bonus: float = 0.1
    preference_shift: float = 0.1
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))
    weights: QoSWeights = field(default_factory=QoSWeights)
    caps: QoSCaps = field(default_factory=QoSCaps)

    @classmethod
    def from_settings(
        cls,
        section: Mapping[str, Any],
        rng: np.random.Generator,
        weights: Optional[QoSWeights] = None,
        caps: Optional[QoSCaps] = None,
    ) -> 'ProceduralMemory':
        return cls(
            regimes=regimes_from_settings(section['regimes']),
            epsilon=float(section['epsilon']),
            learning_rate=float(section['learning_rate']),
            episodic_bonus=float(section['episodic_bonus']),
            preference_shift=float(section['preference_shift']),
            rng=rng,
            weights=weights or QoSWeights(),
            caps=caps or QoSCaps(),
        )

    def regime(self, name: str) -> Regime:
        for regime in self.regimes:
            if regime.name == name:
                return regime
        raise ConfigurationError(f"Régime inconnu: {name}", key='procedural_memory.regimes')

    def choose(self) -> Regime:
        return select_regime(self.regimes, self.epsilon, self.rng)

    def reward(self, name: str, reward: float) -> Regime:
        regime = update_utility(self.regime(name), reward, self.learning_rate)
        logger.debug(f"Utilité du régime {name}: {regime.utility:.4f} ({regime.plays} essais)")
        return regime

    def discover(
        self,
        abstract: AbstractService,
        live: Iterable[ConcreteService],
        wm_premises: Sequence[Premise],
        observed: Optional[Mapping[str, QoSVector]] = None,
    ) -> List[ConcreteService]:
        """Découverte avec les poids décalés vers les préférences en mémoire de travail."""
        weights = self.weights.shifted_toward(preferred_dimensions(wm_premises), self.preference_shift)
        return discover_concrete(abstract, live, weights, self.caps, wm_premises, self.episodic_bonus, observed)

    def regime_table(self) -> List[Dict[str, Any]]:
        return [regime.as_dict() for regime in self.regimes]
