"""
Modèle de services: prémisses, QoS, services concrets et abstraits.

Les prémisses sont des propositions symboliques fermées (sans variables);
l'appariement se réduit donc à des tests d'inclusion d'ensembles.
"""

from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
from dataclasses import dataclass, field
import logging
import math
import re

from ..exceptions.composition_exceptions import ServiceModelError

logger = logging.getLogger(__name__)

_PREMISE_PATTERN = re.compile(r'^\s*([A-Za-z0-9_.\-]+)\s*(?:\((.*)\))?\s*$')

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True, order=True)
class Premise:
    """Proposition symbolique fermée: un prédicat et ses arguments."""
    predicate: str
    args: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.predicate:
            raise ServiceModelError("Prédicat vide")
        # les listes passées par les chargeurs deviennent des tuples
        object.__setattr__(self, 'args', tuple(str(arg) for arg in self.args))

    @classmethod
    def parse(cls, text: str) -> 'Premise':
        """
        Construit une prémisse depuis sa forme textuelle `pred(a,b)`.

        Args:
            text: Forme textuelle, par exemple `ready(stage-01)` ou `x`

        Returns:
            La prémisse correspondante

        Raises:
            ServiceModelError: Si le texte n'est pas une prémisse valide
        """
        match = _PREMISE_PATTERN.match(str(text))
        if not match:
            raise ServiceModelError(f"Prémisse invalide: {text!r}")
        predicate, raw_args = match.groups()
        args: Tuple[str, ...] = ()
        if raw_args is not None and raw_args.strip():
            args = tuple(part.strip() for part in raw_args.split(','))
            if any(not part for part in args):
                raise ServiceModelError(f"Argument vide dans la prémisse: {text!r}")
        return cls(predicate, args)

    def mentions(self) -> Tuple[str, ...]:
        """Identifiants mentionnés par la prémisse (prédicat puis arguments)."""
        return (self.predicate,) + self.args

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(self.args)})"


PremiseSet = FrozenSet[Premise]


def premises(items: Iterable[Union[str, Premise]]) -> PremiseSet:
    """Convertit un itérable de textes ou de prémisses en ensemble figé."""
    return frozenset(item if isinstance(item, Premise) else Premise.parse(item) for item in items)


@dataclass(frozen=True)
class QoSVector:
    """Valeurs de qualité de service d'un service concret."""
    latency: float = 0.0
    reliability: float = 1.0
    cost: float = 0.0
    energy: float = 0.0

    def __post_init__(self):
        for name in ('latency', 'reliability', 'cost', 'energy'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ServiceModelError(f"Valeur QoS non finie: {name}={value}")
        if self.latency < 0 or self.cost < 0 or self.energy < 0:
            raise ServiceModelError(f"Valeur QoS négative: {self}")
        if not 0.0 <= self.reliability <= 1.0:
            raise ServiceModelError(f"Fiabilité hors de [0,1]: {self.reliability}")

    def as_dict(self) -> Dict[str, float]:
        return {
            'latency': self.latency,
            'reliability': self.reliability,
            'cost': self.cost,
            'energy': self.energy,
        }


@dataclass(frozen=True)
class QoSCaps:
    """Plafonds de normalisation QoS (configurables par scénario)."""
    latency: float = 2000.0
    cost: float = 100.0
    energy: float = 100.0

    def __post_init__(self):
        if self.latency <= 0 or self.cost <= 0 or self.energy <= 0:
            raise ServiceModelError(f"Plafonds QoS invalides: {self}")


@dataclass(frozen=True)
class QoSWeights:
    """Poids des quatre composantes QoS; la somme vaut 1."""
    latency: float = 0.25
    reliability: float = 0.25
    cost: float = 0.25
    energy: float = 0.25

    def __post_init__(self):
        validate_weights(self.as_tuple())

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.latency, self.reliability, self.cost, self.energy)

    def shifted_toward(self, dimensions: Iterable[str], amount: float = 0.1) -> 'QoSWeights':
        """
        Déplace `amount` de poids vers chaque dimension préférée.

        Le poids retiré est prélevé proportionnellement sur les autres
        dimensions, la somme reste égale à 1.
        """
        weights = dict(zip(('latency', 'reliability', 'cost', 'energy'), self.as_tuple()))
        for dimension in sorted(set(dimensions)):
            if dimension not in weights:
                continue
            others = [name for name in weights if name != dimension]
            available = sum(weights[name] for name in others)
            moved = min(amount, available)
            if moved <= 0:
                continue
            for name in others:
                weights[name] -= moved * weights[name] / available
            weights[dimension] += moved
        return QoSWeights(**weights)


def validate_weights(weights: Sequence[float]) -> None:
    """
    Vérifie un vecteur de poids QoS.

    Raises:
        ServiceModelError: Si un poids est négatif, si la taille n'est pas 4
            ou si la somme diffère de 1 (±1e-9)
    """
    if len(weights) != 4:
        raise ServiceModelError(f"Quatre poids attendus, reçu {len(weights)}")
    if any(weight < 0 for weight in weights):
        raise ServiceModelError(f"Poids négatif: {tuple(weights)}")
    if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
        raise ServiceModelError(f"La somme des poids doit valoir 1: {sum(weights)}")


@dataclass(frozen=True)
class ConcreteService:
    """Service concret invocable hébergé par un nœud."""
    id: str
    host: Optional[str]
    inputs: PremiseSet = frozenset()
    outputs: PremiseSet = frozenset()
    prec: PremiseSet = frozenset()
    postc: PremiseSet = frozenset()
    qos: QoSVector = field(default_factory=QoSVector)
    ctx: Mapping[str, str] = field(default_factory=dict, hash=False, compare=False)
    # postconditions annotées négatives (liste "delete" du comportement)
    negative: PremiseSet = frozenset()

    @property
    def preconditions(self) -> PremiseSet:
        return self.prec

    def hosted_on(self, host: str) -> 'ConcreteService':
        """Copie du service déployé sur `host`."""
        return ConcreteService(
            id=self.id,
            host=host,
            inputs=self.inputs,
            outputs=self.outputs,
            prec=self.prec,
            postc=self.postc,
            qos=self.qos,
            ctx=dict(self.ctx),
            negative=self.negative,
        )


@dataclass(frozen=True)
class AbstractService:
    """Classe d'équivalence fonctionnelle de services concrets."""
    id: str
    pre: PremiseSet
    post: PremiseSet
    members: Tuple[str, ...]
    delete: PremiseSet = frozenset()

    def __post_init__(self):
        if not self.members:
            raise ServiceModelError(f"Service abstrait sans membres: {self.id}")

    @property
    def preconditions(self) -> PremiseSet:
        return self.pre


def _intersection(sets: List[AbstractSet[Premise]]) -> PremiseSet:
    result = set(sets[0])
    for other in sets[1:]:
        result &= other
    return frozenset(result)


def abstract_from_concretes(members: Sequence[ConcreteService], abstract_id: Optional[str] = None) -> AbstractService:
    """
    Construit le service abstrait réalisé par un groupe de services concrets.

    Les pré/postconditions abstraites sont les intersections n-aires des
    conditions des membres.

    Args:
        members: Services concrets offrant la même fonctionnalité
        abstract_id: Identifiant du service abstrait (défaut: `as:<premier membre>`)

    Returns:
        AbstractService: Le service abstrait

    Raises:
        ServiceModelError: Si la liste est vide ou si le groupe est incohérent
    """
    if not members:
        raise ServiceModelError("no concretes")
    pre = _intersection([member.prec for member in members])
    post = _intersection([member.postc for member in members])
    if not pre and not post:
        raise ServiceModelError(
            f"functionally incoherent group: {[member.id for member in members]}"
        )
    delete = _intersection([member.negative for member in members])
    return AbstractService(
        id=abstract_id or f"as:{members[0].id}",
        pre=pre,
        post=post,
        members=tuple(member.id for member in members),
        delete=delete - post,
    )


def preconditions_satisfied(state: AbstractSet[Premise], service: Union[ConcreteService, AbstractService]) -> bool:
    """Vrai si les préconditions du service sont incluses dans l'état."""
    return service.preconditions <= state


def qos_score(
    q: QoSVector,
    weights: Union[QoSWeights, Sequence[float]],
    caps: QoSCaps = QoSCaps(),
) -> float:
    """
    Calcule le score QoS pondéré d'un service, dans [0,1].

    La fiabilité contribue positivement; latence, coût et énergie contribuent
    comme `1 - min(x / x_max, 1)`.

    Args:
        q: Vecteur QoS
        weights: Poids (latence, fiabilité, coût, énergie)
        caps: Plafonds de normalisation

    Returns:
        float: Score déterministe dans [0,1]

    Raises:
        ServiceModelError: Si les poids sont invalides
    """
    if isinstance(weights, QoSWeights):
        w_latency, w_reliability, w_cost, w_energy = weights.as_tuple()
    else:
        validate_weights(weights)
        w_latency, w_reliability, w_cost, w_energy = weights

    score = (
        w_latency * (1.0 - min(q.latency / caps.latency, 1.0))
        + w_reliability * q.reliability
        + w_cost * (1.0 - min(q.cost / caps.cost, 1.0))
        + w_energy * (1.0 - min(q.energy / caps.energy, 1.0))
    )
    return min(max(score, 0.0), 1.0)
