"""
Perception: conversion des événements sensoriels en percepts.

Les événements externes (requêtes utilisateur, annonces et départs de
services) et internes (lectures de contexte, observations QoS) deviennent des
prémisses de l'univers PR, injectées ensuite dans la mémoire de travail.
"""

from typing import Any, Counter as CounterType, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence
from dataclasses import dataclass, field
from collections import Counter
import itertools
import logging

from ..exceptions.composition_exceptions import PerceptionError, ServiceModelError
from ..services.catalog import (
    AVAILABLE,
    CAPABILITY,
    DEPARTED,
    QOS_OBSERVED,
    ServiceCatalog,
    goal_premise,
)
from ..services.service_model import Premise, PremiseSet, premises

logger = logging.getLogger(__name__)

USER_REQUEST = 'user-request'
SERVICE_ADVERT = 'service-advert'
SERVICE_DEPARTURE = 'service-departure'
CONTEXT_READING = 'context-reading'
QOS_READING = 'qos-reading'

EVENT_KINDS = (USER_REQUEST, SERVICE_ADVERT, SERVICE_DEPARTURE, CONTEXT_READING, QOS_READING)

# Clés de charge utile requises par type d'événement
REQUIRED_PAYLOAD_KEYS: Dict[str, Sequence[str]] = {
    USER_REQUEST: ('request',),
    SERVICE_ADVERT: ('service_id',),
    SERVICE_DEPARTURE: ('service_id',),
    QOS_READING: ('service_id', 'reliability'),
}

DEFAULT_SALIENCE: Dict[str, float] = {
    USER_REQUEST: 1.0,
    SERVICE_ADVERT: 0.6,
    SERVICE_DEPARTURE: 0.8,
    CONTEXT_READING: 0.4,
}

_REQUEST_IDS = itertools.count(1)


@dataclass(frozen=True)
class SensoryEvent:
    """
    Événement sensoriel horodaté.

    Charges utiles par type:
        user-request: `request` (CompositionRequest)
        service-advert / service-departure: `service_id`
        context-reading: `attribute` et `value`, ou `premise` pour une lecture interne
        qos-reading: `service_id`, `reliability` et optionnellement `latency`, `cost`, `energy`
    """
    kind: str
    payload: Mapping[str, Any] = field(default_factory=dict, hash=False)
    timestamp: float = 0.0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise PerceptionError(f"Type d'événement inconnu: {self.kind}")
        if self.timestamp < 0:
            raise PerceptionError(f"Horodatage négatif: {self.timestamp}")
        missing = [key for key in REQUIRED_PAYLOAD_KEYS.get(self.kind, ()) if key not in self.payload]
        if self.kind == CONTEXT_READING and 'premise' not in self.payload:
            missing = [key for key in ('attribute', 'value') if key not in self.payload]
        if missing:
            raise PerceptionError(f"Événement {self.kind}: clés manquantes {missing}")


@dataclass(frozen=True)
class Percept:
    """Prémisse perçue, avec sa saillance et le type d'événement source."""
    premise: Premise
    salience: float
    source: str


@dataclass(frozen=True)
class CompositionRequest:
    """Requête de composition: buts à atteindre avant l'échéance."""
    id: str
    goals: PremiseSet
    issue_time: float
    deadline: float
    context: PremiseSet = frozenset()
    requester: Optional[str] = None

    @property
    def expires_at(self) -> float:
        return self.issue_time + self.deadline


def encode_request(
    goals: Iterable[Any],
    deadline: float,
    issue_time: float = 0.0,
    request_id: Optional[str] = None,
    context: Iterable[Any] = (),
    requester: Optional[str] = None,
    universe: Optional[Any] = None,
) -> CompositionRequest:
    """
    Construit une requête de composition.

    Args:
        goals: Prémisses de but (textes ou Premise)
        deadline: Échéance relative en secondes
        issue_time: Instant d'émission
        request_id: Identifiant (un identifiant frais est attribué si absent)
        context: Prémisses d'état initial de l'utilisateur
        requester: Nœud émetteur
        universe: Univers PR à respecter (optionnel)

    Returns:
        CompositionRequest: La requête

    Raises:
        PerceptionError: Si l'ensemble de buts est vide ou hors de PR
    """
    try:
        goal_set = premises(goals)
        context_set = premises(context)
    except ServiceModelError as e:
        raise PerceptionError(f"Requête invalide: {e}")
    if not goal_set:
        raise PerceptionError("Requête sans but")
    if deadline <= 0:
        raise PerceptionError(f"Échéance invalide: {deadline}")
    if universe is not None:
        outside = sorted(str(goal) for goal in goal_set if goal not in universe)
        if outside:
            raise PerceptionError(f"Buts hors de l'univers de prémisses: {outside}")
    return CompositionRequest(
        id=request_id or f"req-{next(_REQUEST_IDS):06d}",
        goals=goal_set,
        issue_time=float(issue_time),
        deadline=float(deadline),
        context=context_set,
        requester=requester,
    )


def _event_percepts(
    event: SensoryEvent,
    catalog: ServiceCatalog,
    salience: Mapping[str, float],
    diagnostics: CounterType[str],
) -> List[Percept]:
    payload = event.payload
    kind = event.kind

    if kind == USER_REQUEST:
        request = payload['request']
        return [
            Percept(goal_premise(goal), salience[USER_REQUEST], kind)
            for goal in sorted(request.goals)
        ]

    if kind == CONTEXT_READING:
        if 'premise' in payload:
            premise = payload['premise']
            if not isinstance(premise, Premise):
                premise = Premise.parse(premise)
        else:
            value = payload['value']
            args = tuple(value) if isinstance(value, (list, tuple)) else (value,)
            premise = Premise(str(payload['attribute']), args)
        return [Percept(premise, salience[CONTEXT_READING], kind)]

    service_id = str(payload['service_id'])
    if catalog.concrete(service_id) is None:
        diagnostics['unknown_service'] += 1
        logger.warning(f"Événement {kind} pour un service inconnu: {service_id}")
        return []

    if kind == SERVICE_ADVERT:
        result = [Percept(Premise(AVAILABLE, (service_id,)), salience[SERVICE_ADVERT], kind)]
        abstract_id = catalog.abstract_of(service_id)
        if abstract_id is not None:
            result.append(Percept(Premise(CAPABILITY, (abstract_id,)), salience[SERVICE_ADVERT], kind))
        return result
    if kind == SERVICE_DEPARTURE:
        return [Percept(Premise(DEPARTED, (service_id,)), salience[SERVICE_DEPARTURE], kind)]

    reliability = min(max(float(payload['reliability']), 0.0), 1.0)
    return [Percept(Premise(QOS_OBSERVED, (service_id,)), reliability, kind)]


def perceive(
    events: Sequence[SensoryEvent],
    catalog: ServiceCatalog,
    diagnostics: Optional[CounterType[str]] = None,
    salience: Optional[Mapping[str, float]] = None,
) -> List[Percept]:
    """
    Convertit une séquence d'événements en percepts.

    Les événements référençant un service inconnu et les prémisses hors de
    l'univers PR sont ignorés; les compteurs de diagnostic sont incrémentés.

    Args:
        events: Événements ordonnés par horodatage
        catalog: Catalogue des services connus
        diagnostics: Compteurs de diagnostic à incrémenter (optionnel)
        salience: Saillance par type d'événement (défaut: DEFAULT_SALIENCE)

    Returns:
        List[Percept]: Percepts dans l'ordre des événements
    """
    counters = diagnostics if diagnostics is not None else Counter()
    weights = dict(DEFAULT_SALIENCE)
    if salience:
        weights.update(salience)
    universe = catalog.universe

    percepts: List[Percept] = []
    last_time = 0.0
    for event in events:
        if event.timestamp < last_time:
            counters['out_of_order'] += 1
            logger.debug(f"Événement hors ordre: {event.kind} à {event.timestamp}")
        last_time = max(last_time, event.timestamp)
        try:
            candidates = _event_percepts(event, catalog, weights, counters)
        except ServiceModelError as e:
            counters['malformed_event'] += 1
            logger.warning(f"Événement {event.kind} ignoré: {e}")
            continue
        for percept in candidates:
            if percept.premise not in universe:
                counters['outside_universe'] += 1
                logger.warning(f"Prémisse hors de l'univers ignorée: {percept.premise}")
                continue
            percepts.append(percept)
    return percepts


def goal_set_of(requests: Iterable[CompositionRequest]) -> FrozenSet[Premise]:
    """Union des buts d'un ensemble de requêtes."""
    result: set = set()
    for request in requests:
        result |= request.goals
    return frozenset(result)
