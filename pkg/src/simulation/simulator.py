"""
Simulateur à événements discrets d'un réseau mobile ad hoc (MANET).

Le simulateur possède l'horloge globale, la mobilité des nœuds, la
connectivité radio, l'hébergement des services par les fournisseurs et la
livraison des messages. Les compositeurs sont attachés aux nœuds demandeurs.
Le traitement des événements est un ordre total: (instant, type, numéro de
séquence).
"""

from typing import Any, Counter as CounterType, Dict, List, Mapping, Optional, Sequence, Set, Tuple
from dataclasses import dataclass, field
from collections import Counter
from enum import IntEnum
import heapq
import logging
import math

import numpy as np

from ..exceptions.composition_exceptions import SimulationComplete, SimulationError
from ..perception.perception import CompositionRequest
from ..services.catalog import ServiceCatalog
from .composer import Composer
from .mobility import SimNode, move_random_waypoint, zone_of
from .network import (
    ADVERT,
    DISCOVERY,
    INVOKE,
    RESPONSE,
    NetMessage,
    RadioModel,
    adjacency,
    hop_counts,
    path_intact,
    shortest_path,
)

logger = logging.getLogger(__name__)

PROVIDER_TIMER = 'provider'
COMPOSER_TIMER = 'composer'


class EventKind(IntEnum):
    """Types d'événements; l'ordre départage les événements simultanés."""
    MOVE_TICK = 0
    MESSAGE_DELIVERY = 1
    TIMER = 2
    CYCLE_TICK = 3
    ADVERT_TICK = 4
    REQUEST_ISSUE = 5


@dataclass(order=True)
class SimEvent:
    time: float
    kind: EventKind
    seq: int
    payload: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class SimulationConfig:
    """Paramètres du scénario réseau."""
    arena: Tuple[float, float] = (1000.0, 1000.0)
    nodes: int = 60
    requesters: int = 3
    radio_range: float = 100.0
    move_period: float = 0.5
    advert_period: float = 2.0
    discovery_ttl: int = 3
    hop_latency: float = 0.010
    bandwidth_bps: float = 1_000_000.0
    message_size: int = 256
    event_log: bool = False
    cycle_period: float = 0.1

    @classmethod
    def from_settings(cls, section: Mapping[str, Any], cycle_period: float = 0.1) -> 'SimulationConfig':
        values = dict(section)
        values['arena'] = tuple(float(v) for v in values['arena'])
        return cls(cycle_period=cycle_period, **values)

    @property
    def radio(self) -> RadioModel:
        return RadioModel(self.radio_range, self.hop_latency, self.bandwidth_bps, self.discovery_ttl)


def deploy_services(
    catalog: ServiceCatalog,
    providers: Sequence[SimNode],
    density: int,
    rng: np.random.Generator,
) -> Dict[str, str]:
    """
    Place exactement `density` services concrets sur les nœuds fournisseurs.

    Chaque service abstrait de la chaîne des buts reçoit au moins un membre;
    les autres services sont tirés uniformément sans remise, et chaque
    service est hébergé par un fournisseur tiré uniformément.

    Returns:
        Dict[str, str]: Identifiant de service -> identifiant de nœud

    Raises:
        SimulationError: Densité invalide, catalogue trop petit ou aucun fournisseur
    """
    if density <= 0:
        raise SimulationError(f"Densité de services invalide: {density}")
    if not providers:
        raise SimulationError("Aucun nœud fournisseur")
    if len(catalog.concretes) < density:
        raise SimulationError(
            f"Catalogue trop petit pour la densité {density}: {len(catalog.concretes)} services"
        )
    chain = catalog.goal_chain()
    if len(chain) > density:
        raise SimulationError(f"Densité {density} inférieure à la longueur de chaîne {len(chain)}")

    chosen: List[str] = []
    for abstract_id in chain:
        members = list(catalog.abstracts[abstract_id].members)
        chosen.append(members[int(rng.integers(len(members)))])
    rest = sorted(set(catalog.concretes) - set(chosen))
    extra = density - len(chosen)
    if extra:
        picked = rng.choice(len(rest), size=extra, replace=False)
        chosen.extend(rest[int(i)] for i in sorted(picked))

    assignment = {}
    for service_id in sorted(chosen):
        assignment[service_id] = providers[int(rng.integers(len(providers)))].id
    return assignment


class ManetSimulator:
    """
    Simulateur MANET déterministe.

    Args:
        nodes: Nœuds du scénario (demandeurs et fournisseurs)
        catalog: Catalogue déployé (hôtes renseignés)
        band: Bande de vitesse de la mobilité
        config: Paramètres du scénario
        mobility_rng: Flux aléatoire de la mobilité
        service_rng: Flux aléatoire des succès d'invocation
    """

    def __init__(
        self,
        nodes: Sequence[SimNode],
        catalog: ServiceCatalog,
        band: Tuple[float, float],
        config: SimulationConfig,
        mobility_rng: np.random.Generator,
        service_rng: np.random.Generator,
    ):
        self.nodes: Dict[str, SimNode] = {node.id: node for node in nodes}
        self.catalog = catalog
        self.band = band
        self.config = config
        self.radio = config.radio
        self.mobility_rng = mobility_rng
        self.service_rng = service_rng
        self.composers: Dict[str, Composer] = {}
        self.now = 0.0
        self.diagnostics: CounterType[str] = Counter()
        self.event_log: List[Dict[str, Any]] = []
        self._queue: List[SimEvent] = []
        self._seq = 0
        self._cycle_index: Optional[int] = None
        self._adjacency: Dict[str, List[str]] = {}
        self._reach: Dict[str, Set[str]] = {}
        self._started = False

        for node in self.nodes.values():
            node.hosted = []
        for service in catalog.concretes.values():
            if service.host is not None and service.host in self.nodes:
                self.nodes[service.host].hosted.append(service.id)

    # Planification

    def schedule(self, time: float, kind: EventKind, payload: Optional[Dict[str, Any]] = None) -> SimEvent:
        if time < self.now:
            raise SimulationError(f"Événement dans le passé: {time} < {self.now}")
        event = SimEvent(time, kind, self._seq, payload or {})
        self._seq += 1
        heapq.heappush(self._queue, event)
        return event

    def schedule_timer(self, node_id: str, delay: float, payload: Dict[str, Any], owner: str = COMPOSER_TIMER) -> None:
        self.schedule(self.now + max(delay, 0.0), EventKind.TIMER, {'node': node_id, 'owner': owner, 'data': payload})

    def schedule_request(self, request: CompositionRequest) -> None:
        if request.requester not in self.composers:
            raise SimulationError(f"Aucun compositeur sur le nœud {request.requester}")
        self.schedule(request.issue_time, EventKind.REQUEST_ISSUE, {'request': request})

    def add_composer(self, node_id: str, composer: Composer) -> None:
        if node_id not in self.nodes:
            raise SimulationError(f"Nœud inconnu: {node_id}")
        self.composers[node_id] = composer
        composer.attach(self, node_id)

    def start(self) -> None:
        """Calcule la topologie initiale et planifie les ticks périodiques."""
        if self._started:
            return
        self._started = True
        self._refresh_topology()
        for node_id in sorted(self.composers):
            self._reach[node_id] = self._provider_reach(node_id)
        self.schedule(self.now + self.config.move_period, EventKind.MOVE_TICK)
        providers = [node for node in self.nodes.values() if node.hosted]
        for index, node in enumerate(providers):
            offset = self.config.advert_period * (index + 1) / (len(providers) + 1)
            self.schedule(self.now + offset, EventKind.ADVERT_TICK, {'node': node.id})
        for node_id in sorted(self.composers):
            node = self.nodes[node_id]
            self.composers[node_id].on_context('zone', zone_of(node, self.config.arena), self.now)

    # Boucle d'événements

    @property
    def pending(self) -> int:
        return len(self._queue)

    def peek_time(self) -> Optional[float]:
        return self._queue[0].time if self._queue else None

    def step(self) -> SimEvent:
        """
        Traite l'événement le plus ancien.

        Raises:
            SimulationComplete: Si la file d'événements est vide
        """
        if not self._queue:
            raise SimulationComplete("File d'événements vide")
        event = heapq.heappop(self._queue)
        self.now = event.time
        if self.config.event_log:
            self.event_log.append(self._log_entry(event))
        handler = {
            EventKind.MOVE_TICK: self._on_move,
            EventKind.MESSAGE_DELIVERY: self._on_delivery,
            EventKind.TIMER: self._on_timer,
            EventKind.CYCLE_TICK: self._on_cycle,
            EventKind.ADVERT_TICK: self._on_advert,
            EventKind.REQUEST_ISSUE: self._on_request,
        }[event.kind]
        handler(event.payload)
        return event

    def run(self, until: float) -> None:
        """Traite les événements jusqu'à l'instant `until` inclus."""
        self.start()
        while self._queue and self._queue[0].time <= until:
            self.step()
        self.now = max(self.now, until)

    def _log_entry(self, event: SimEvent) -> Dict[str, Any]:
        entry: Dict[str, Any] = {'time': round(event.time, 9), 'kind': event.kind.name, 'seq': event.seq}
        payload = event.payload
        if 'message' in payload:
            message = payload['message']
            entry.update({'src': message.src, 'dst': message.dst, 'message': message.kind})
        elif 'request' in payload:
            entry['request'] = payload['request'].id
        elif 'node' in payload:
            entry['node'] = payload['node']
        return entry

    # Topologie

    def _refresh_topology(self) -> None:
        self._adjacency = adjacency(list(self.nodes.values()), self.radio.radio_range)

    def neighbors(self, node_id: str) -> List[str]:
        return self._adjacency.get(node_id, [])

    def hops_from(self, node_id: str, max_hops: Optional[int] = None) -> Dict[str, int]:
        return hop_counts(self._adjacency, node_id, max_hops)

    def _provider_reach(self, node_id: str) -> Set[str]:
        reach = self.hops_from(node_id, self.radio.ttl)
        return {other for other in reach if other != node_id and self.nodes[other].hosted}

    def _on_move(self, payload: Dict[str, Any]) -> None:
        for node_id in sorted(self.nodes):
            move_random_waypoint(self.nodes[node_id], self.config.move_period, self.config.arena, self.band, self.mobility_rng)
        self._refresh_topology()
        for node_id in sorted(self.composers):
            composer = self.composers[node_id]
            reach = self._provider_reach(node_id)
            lost = self._reach.get(node_id, set()) - reach
            self._reach[node_id] = reach
            if lost:
                services = sorted(s for host in lost for s in self.nodes[host].hosted)
                self.diagnostics['departure_notifications'] += len(services)
                composer.on_topology(services, self.now)
            composer.on_context('zone', zone_of(self.nodes[node_id], self.config.arena), self.now)
        self.schedule(self.now + self.config.move_period, EventKind.MOVE_TICK)

    # Messages

    def _deliver_at(self, message: NetMessage, path: Tuple[str, ...]) -> None:
        message.path = path
        delay = self.radio.latency(len(path) - 1, message.size)
        self.schedule(self.now + delay, EventKind.MESSAGE_DELIVERY, {'message': message})

    def send(self, src: str, dst: str, kind: str, payload: Dict[str, Any], size: Optional[int] = None) -> bool:
        """
        Envoi point à point le long du plus court chemin courant.

        Returns:
            False si la destination est injoignable (message abandonné)
        """
        path = shortest_path(self._adjacency, src, dst)
        if path is None:
            self.diagnostics['unreachable'] += 1
            return False
        message = NetMessage(src, dst, kind, size or self.config.message_size, self.now, dict(payload))
        self._deliver_at(message, path)
        return True

    def flood(
        self,
        src: str,
        kind: str,
        payload: Dict[str, Any],
        ttl: Optional[int] = None,
        targets: Optional[Set[str]] = None,
    ) -> int:
        """
        Diffusion relayée jusqu'à `ttl` sauts.

        Returns:
            Nombre de destinataires atteints à l'émission
        """
        reach = self.hops_from(src, self.radio.ttl if ttl is None else ttl)
        count = 0
        for node_id in sorted(reach):
            if node_id == src or (targets is not None and node_id not in targets):
                continue
            path = shortest_path(self._adjacency, src, node_id)
            if path is None:
                continue
            message = NetMessage(src, node_id, kind, self.config.message_size, self.now, dict(payload))
            self._deliver_at(message, path)
            count += 1
        return count

    def _on_delivery(self, payload: Dict[str, Any]) -> None:
        message: NetMessage = payload['message']
        if not path_intact(self._adjacency, message.path):
            self.diagnostics['dropped'] += 1
            return
        self.diagnostics['delivered'] += 1
        if message.kind in (DISCOVERY, INVOKE):
            self._provider_receive(message)
            return
        composer = self.composers.get(message.dst)
        if composer is not None:
            composer.on_message(message, self.now)

    def _on_advert(self, payload: Dict[str, Any]) -> None:
        node = self.nodes[payload['node']]
        if node.hosted:
            self.flood(
                node.id,
                ADVERT,
                {'host': node.id, 'services': list(node.hosted)},
                targets=set(self.composers),
            )
        self.schedule(self.now + self.config.advert_period, EventKind.ADVERT_TICK, {'node': node.id})

    # Hébergement des services

    def _provider_receive(self, message: NetMessage) -> None:
        node = self.nodes[message.dst]
        data = message.payload
        if message.kind == DISCOVERY:
            if data.get('type') == 'commit':
                self.send(node.id, message.src, RESPONSE, {
                    'type': 'commit',
                    'query_id': data['query_id'],
                    'service_id': data['service_id'],
                    'ok': data['service_id'] in node.hosted,
                })
                return
            wanted = set(data.get('premises', ()))
            matches = []
            for service_id in node.hosted:
                service = self.catalog.concretes[service_id]
                if {str(p) for p in service.postc} & wanted:
                    matches.append({
                        'id': service_id,
                        'host': node.id,
                        'hops': message.hops,
                        'prec': sorted(str(p) for p in service.prec),
                        'postc': sorted(str(p) for p in service.postc),
                    })
            if matches:
                self.send(node.id, message.src, RESPONSE, {
                    'type': 'discovery',
                    'query_id': data['query_id'],
                    'services': matches,
                })
            return

        service_id = data['service_id']
        if service_id not in node.hosted:
            self._respond_invocation(node.id, message.src, data, success=False)
            return
        service = self.catalog.concretes[service_id]
        self.schedule_timer(node.id, service.qos.latency / 1000.0, {
            'type': 'serve', 'requester': message.src, 'invoke': dict(data),
        }, owner=PROVIDER_TIMER)

    def _respond_invocation(self, provider: str, requester: str, data: Mapping[str, Any], success: bool) -> None:
        service = self.catalog.concretes.get(data['service_id'])
        self.send(provider, requester, RESPONSE, {
            'type': 'invoke',
            'invocation_id': data['invocation_id'],
            'request_id': data.get('request_id'),
            'service_id': data['service_id'],
            'success': success,
            'qos': service.qos.as_dict() if service is not None else {},
        })

    def _on_timer(self, payload: Dict[str, Any]) -> None:
        node_id = payload['node']
        data = payload['data']
        if payload['owner'] == PROVIDER_TIMER:
            invoke = data['invoke']
            service = self.catalog.concretes[invoke['service_id']]
            success = bool(self.service_rng.random() < service.qos.reliability)
            if not success:
                self.diagnostics['invocation_failures'] += 1
            self._respond_invocation(node_id, data['requester'], invoke, success)
            return
        composer = self.composers.get(node_id)
        if composer is not None:
            composer.on_timer(data, self.now)

    # Requêtes et cycles

    def _on_request(self, payload: Dict[str, Any]) -> None:
        request: CompositionRequest = payload['request']
        self.composers[request.requester].on_request(request, self.now)
        self._ensure_cycle()

    def _ensure_cycle(self) -> None:
        if self._cycle_index is not None:
            return
        period = self.config.cycle_period
        index = int(math.floor(self.now / period + 1e-9)) + 1
        self._cycle_index = index
        self.schedule(max(index * period, self.now), EventKind.CYCLE_TICK, {'index': index})

    def _on_cycle(self, payload: Dict[str, Any]) -> None:
        active = False
        for node_id in sorted(self.composers):
            composer = self.composers[node_id]
            if not composer.has_open_requests:
                continue
            composer.on_cycle(self.now)
            composer.sample_memory()
            active = active or composer.has_open_requests
        if active:
            index = payload['index'] + 1
            self._cycle_index = index
            self.schedule(max(index * self.config.cycle_period, self.now), EventKind.CYCLE_TICK, {'index': index})
        else:
            self._cycle_index = None

    def outcomes(self) -> List[Any]:
        result = []
        for node_id in sorted(self.composers):
            result.extend(self.composers[node_id].outcomes)
        return sorted(result, key=lambda outcome: (outcome.issue_time, outcome.request_id))
