"""
Attention sélective: réseau de comportements à propagation d'activation.

Chaque comportement correspond à un service abstrait. L'état (mémoire de
travail), les buts et les buts protégés injectent ou retirent de
l'activation; les comportements se l'échangent ensuite par leurs liens
successeur, prédécesseur et conflictuel. Le comportement exécutable le plus
activé au-dessus du seuil est sélectionné.
"""

from typing import AbstractSet, Any, Dict, List, Mapping, Optional, Sequence, Tuple
from dataclasses import dataclass, field, replace
import logging
import math

from ..exceptions.composition_exceptions import BehaviorNetworkError
from ..services.service_model import AbstractService, Premise, PremiseSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BNParams:
    """
    Paramètres du réseau.

    Args:
        pi: Niveau moyen d'activation π
        theta: Seuil de sélection θ
        phi: Injection par unité d'état φ
        gamma: Injection par but γ
        delta: Retrait par but protégé δ
        theta_current: Seuil courant (défaut: θ)
    """
    pi: float = 20.0
    theta: float = 45.0
    phi: float = 20.0
    gamma: float = 70.0
    delta: float = 50.0
    theta_current: Optional[float] = None

    def __post_init__(self):
        values = (self.pi, self.theta, self.phi, self.gamma, self.delta)
        if not all(math.isfinite(value) for value in values):
            raise BehaviorNetworkError(f"Paramètres non finis: {self}")
        if self.pi <= 0 or self.theta <= 0:
            raise BehaviorNetworkError(f"π et θ doivent être positifs: {self}")
        if self.phi < 0 or self.gamma < 0 or self.delta < 0:
            raise BehaviorNetworkError(f"φ, γ et δ doivent être positifs ou nuls: {self}")
        if self.theta_current is None:
            object.__setattr__(self, 'theta_current', self.theta)
        if not 0.0 < self.theta_current <= self.theta:
            raise BehaviorNetworkError(f"Seuil courant hors de (0, θ]: {self.theta_current}")

    def with_threshold(self, theta_current: float) -> 'BNParams':
        return replace(self, theta_current=theta_current)

    def as_dict(self) -> Dict[str, float]:
        return {'pi': self.pi, 'theta': self.theta, 'phi': self.phi, 'gamma': self.gamma, 'delta': self.delta}


@dataclass(frozen=True)
class SpreadFractions:
    """Fractions de propagation interne: avant σ_f, arrière σ_b, conflit σ_c."""
    forward: float = 1.0
    backward: float = 0.7
    conflict: float = 0.5
    threshold_decay: float = 0.9


@dataclass
class Behavior:
    """Comportement associé à un service abstrait."""
    id: str
    preconditions: PremiseSet
    add_list: PremiseSet
    delete_list: PremiseSet = frozenset()
    activation: float = 0.0
    # activation accumulée au dernier pas, avant normalisation
    raw_activation: float = 0.0

    def __post_init__(self):
        if self.add_list & self.delete_list:
            raise BehaviorNetworkError(f"Listes d'ajout et de suppression non disjointes: {self.id}")

    def executable(self, state: AbstractSet[Premise]) -> bool:
        return self.preconditions <= state


@dataclass
class BehaviorNetwork:
    """Réseau de comportements et liens dérivés des recouvrements pre/add/delete."""
    behaviors: Dict[str, Behavior]
    params: BNParams = field(default_factory=BNParams)
    fractions: SpreadFractions = field(default_factory=SpreadFractions)
    successors: Dict[str, List[str]] = field(default_factory=dict)
    predecessors: Dict[str, List[str]] = field(default_factory=dict)
    conflicters: Dict[str, List[str]] = field(default_factory=dict)

    def ids(self) -> List[str]:
        return sorted(self.behaviors)

    def mean_activation(self) -> float:
        if not self.behaviors:
            return self.params.pi
        return sum(b.activation for b in self.behaviors.values()) / len(self.behaviors)

    def set_activation(self, behavior_id: str, value: float) -> None:
        behavior = self.behaviors[behavior_id]
        behavior.activation = value
        behavior.raw_activation = value

    def set_params(self, params: BNParams) -> None:
        """Change de régime; le seuil courant repart de θ."""
        self.params = params.with_threshold(params.theta)

    def links(self) -> Dict[str, List[Tuple[str, str]]]:
        return {
            'successor': [(a, b) for a in self.ids() for b in self.successors[a]],
            'predecessor': [(a, b) for a in self.ids() for b in self.predecessors[a]],
            'conflicter': [(a, b) for a in self.ids() for b in self.conflicters[a]],
        }


def derive_links(behaviors: Mapping[str, Behavior]) -> Tuple[Dict[str, List[str]], Dict[str, List[str]], Dict[str, List[str]]]:
    """
    Liens entre comportements distincts:
    successeur a→b si add(a) ∩ pre(b) ≠ ∅, prédécesseur a→b si pre(a) ∩ add(b) ≠ ∅,
    conflictuel a→b si pre(a) ∩ delete(b) ≠ ∅.
    """
    ids = sorted(behaviors)
    successors = {a: [b for b in ids if b != a and behaviors[a].add_list & behaviors[b].preconditions] for a in ids}
    predecessors = {a: [b for b in ids if b != a and behaviors[a].preconditions & behaviors[b].add_list] for a in ids}
    conflicters = {a: [b for b in ids if b != a and behaviors[a].preconditions & behaviors[b].delete_list] for a in ids}
    return successors, predecessors, conflicters


def build_network(
    services: Sequence[AbstractService],
    params: Optional[BNParams] = None,
    fractions: Optional[SpreadFractions] = None,
) -> BehaviorNetwork:
    """
    Construit le réseau: un comportement par service abstrait.

    La liste d'ajout est la postcondition abstraite, la liste de suppression
    l'ensemble des postconditions annotées négatives.

    Raises:
        BehaviorNetworkError: Si deux services ont le même identifiant
    """
    params = params or BNParams()
    behaviors: Dict[str, Behavior] = {}
    for service in services:
        if service.id in behaviors:
            raise BehaviorNetworkError(f"Identifiant de comportement dupliqué: {service.id}")
        behaviors[service.id] = Behavior(
            id=service.id,
            preconditions=service.pre,
            add_list=service.post - service.delete,
            delete_list=service.delete,
            activation=params.pi,
            raw_activation=params.pi,
        )
    successors, predecessors, conflicters = derive_links(behaviors)
    network = BehaviorNetwork(
        behaviors=behaviors,
        params=params,
        fractions=fractions or SpreadFractions(),
        successors=successors,
        predecessors=predecessors,
        conflicters=conflicters,
    )
    logger.debug(f"Réseau de comportements construit: {len(behaviors)} comportements")
    return network


def _share(targets: Dict[str, float], receivers: List[str], amount: float) -> None:
    if not receivers:
        return
    portion = amount / len(receivers)
    for receiver in receivers:
        targets[receiver] += portion


def activation_step(
    net: BehaviorNetwork,
    state: AbstractSet[Premise],
    goals: AbstractSet[Premise],
    protected: AbstractSet[Premise],
) -> None:
    """
    Une mise à jour synchrone des activations depuis un instantané.

    Ordre: injection de l'état, des buts, retrait des buts protégés,
    propagation avant/arrière, inhibition des conflictuels, plancher à 0 et
    normalisation de la moyenne à π.
    """
    behaviors = net.behaviors
    if not behaviors:
        return
    params = net.params
    fractions = net.fractions
    ids = net.ids()
    snapshot = {b: behaviors[b].activation for b in ids}
    delta: Dict[str, float] = {b: 0.0 for b in ids}

    for premise in sorted(state):
        _share(delta, [b for b in ids if premise in behaviors[b].preconditions], params.phi)
    for goal in sorted(goals):
        _share(delta, [b for b in ids if goal in behaviors[b].add_list], params.gamma)
    for premise in sorted(protected):
        _share(delta, [b for b in ids if premise in behaviors[b].delete_list], -params.delta)

    for a in ids:
        behavior = behaviors[a]
        alpha = snapshot[a]
        if behavior.executable(state):
            # avant: vers les successeurs, réparti sur les préconditions non satisfaites atteintes
            pairs = [
                b
                for b in net.successors[a]
                for _ in (behaviors[b].preconditions - state) & behavior.add_list
            ]
            _share(delta, pairs, fractions.forward * alpha)
        else:
            # arrière: vers les prédécesseurs qui atteignent une précondition non satisfaite
            missing = behavior.preconditions - state
            pairs = [
                b
                for p in sorted(missing)
                for b in net.predecessors[a]
                if p in behaviors[b].add_list
            ]
            _share(delta, pairs, fractions.backward * alpha)
        # inhibition des comportements qui supprimeraient une précondition vraie
        pairs = [
            b
            for b in net.conflicters[a]
            for _ in behavior.preconditions & behaviors[b].delete_list & state
        ]
        _share(delta, pairs, -fractions.conflict * alpha)

    raw = {b: snapshot[b] + delta[b] for b in ids}
    floored = {b: max(value, 0.0) for b, value in raw.items()}
    total = sum(floored.values())
    target = params.pi * len(ids)
    for b in ids:
        behaviors[b].raw_activation = raw[b]
        behaviors[b].activation = floored[b] * target / total if total > 0 else params.pi


def select_behavior(net: BehaviorNetwork, state: AbstractSet[Premise]) -> Optional[str]:
    """
    Sélectionne le comportement exécutable le plus activé au-dessus du seuil courant.

    La comparaison au seuil porte sur l'activation accumulée au dernier pas.
    Le comportement choisi perd son activation et le seuil repart de θ; sans
    candidat, le seuil courant décroît de 10 %.
    """
    threshold = net.params.theta_current
    candidates = [
        b for b in net.behaviors.values()
        if b.executable(state) and b.raw_activation >= threshold
    ]
    if not candidates:
        net.params = net.params.with_threshold(threshold * net.fractions.threshold_decay)
        logger.debug(f"Aucun comportement sélectionné, seuil abaissé à {net.params.theta_current:.3f}")
        return None
    chosen = min(candidates, key=lambda b: (-b.raw_activation, b.id))
    chosen.activation = 0.0
    chosen.raw_activation = 0.0
    net.params = net.params.with_threshold(net.params.theta)
    return chosen.id


def trace_rows(net: BehaviorNetwork, state: AbstractSet[Premise], cycle: int, selected: Optional[str]) -> List[Dict[str, Any]]:
    """Table de trace: une ligne par comportement (cycle, comportement, α, exécutable, sélectionné)."""
    return [
        {
            'cycle': cycle,
            'behavior': b,
            'activation': round(net.behaviors[b].activation, 9),
            'executable': net.behaviors[b].executable(state),
            'selected': b == selected,
        }
        for b in net.ids()
    ]
