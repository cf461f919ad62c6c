"""
Adaptateur entre l'agent COPERNIC et le simulateur.

Les messages, notifications et lectures reçus entre deux cycles sont mis en
tampon sous forme d'événements sensoriels; chaque tick de cycle exécute un
cycle cognitif et traduit les invocations en messages réseau.
"""

from typing import Any, List, Mapping
import logging

from ..perception.perception import (
    CONTEXT_READING,
    SERVICE_ADVERT,
    SERVICE_DEPARTURE,
    USER_REQUEST,
    CompositionRequest,
    SensoryEvent,
)
from ..reporting.memory_meter import LiveState
from ..services.service_model import QoSVector
from ..simulation.composer import Composer
from ..simulation.network import ADVERT, INVOKE, RESPONSE, NetMessage
from .actions import FAILURE, SUCCESS, TIMEOUT, ActionKind, InvocationResult
from .copernic_agent import CopernicAgent

logger = logging.getLogger(__name__)

INVOKE_TIMER = 'invoke-timeout'


class CopernicComposer(Composer):
    """Compositeur à architecture cognitive."""

    name = 'copernic'

    def __init__(self, agent: CopernicAgent):
        super().__init__()
        self.agent = agent
        self.buffer: List[SensoryEvent] = []

    def handle_request(self, request: CompositionRequest, t: float) -> None:
        self.buffer.append(SensoryEvent(USER_REQUEST, {'request': request}, t))
        # le contexte utilisateur (préférence, zone) accompagne la requête
        keys = set(self.agent.catalog.context_keys)
        for premise in sorted(request.context):
            if premise.predicate in keys:
                self.buffer.append(SensoryEvent(CONTEXT_READING, {'premise': premise}, t))

    def handle_message(self, message: NetMessage, t: float) -> None:
        data = message.payload
        if message.kind == ADVERT:
            for service_id in data['services']:
                self.buffer.append(SensoryEvent(SERVICE_ADVERT, {'service_id': service_id, 'host': data['host']}, t))
        elif message.kind == RESPONSE and data.get('type') == 'invoke':
            invocation_id = data['invocation_id']
            pending = self.agent.pending.get(invocation_id)
            if pending is None:
                return
            qos = dict(data.get('qos') or {})
            if qos:
                qos['latency'] = (t - pending.time) * 1000.0
            outcome = SUCCESS if data['success'] else FAILURE
            self._apply(InvocationResult(invocation_id, outcome, t, QoSVector(**qos) if qos else None), t)

    def handle_departures(self, departed_services: List[str], t: float) -> None:
        for service_id in departed_services:
            self.buffer.append(SensoryEvent(SERVICE_DEPARTURE, {'service_id': service_id}, t))

    def handle_context(self, attribute: str, value: str, t: float) -> None:
        self.buffer.append(SensoryEvent(CONTEXT_READING, {'attribute': attribute, 'value': value}, t))

    def handle_timer(self, payload: Mapping[str, Any], t: float) -> None:
        if payload.get('type') != INVOKE_TIMER:
            return
        invocation_id = payload['invocation_id']
        if invocation_id in self.agent.pending:
            self._apply(InvocationResult(invocation_id, TIMEOUT, t), t)

    def handle_expiry(self, request_id: str, t: float) -> None:
        self.agent.expire(request_id, t)

    def handle_cycle(self, t: float) -> None:
        events = sorted(self.buffer, key=lambda event: event.timestamp)
        self.buffer = []
        # seuls les événements requête ouverts côté compositeur sont transmis
        events = [
            event for event in events
            if event.kind != USER_REQUEST or event.payload['request'].id in self.open
        ]
        for action in self.agent.run_cycle(events, t):
            if action.kind != ActionKind.INVOKE_CONCRETE:
                continue
            self.count_invocation(action.request_id)
            sent = self.sim.send(self.node_id, action.host, INVOKE, {
                'invocation_id': action.invocation_id,
                'service_id': action.service_id,
                'request_id': action.request_id,
            })
            if not sent:
                self._apply(InvocationResult(action.invocation_id, FAILURE, t), t)
                continue
            self.sim.schedule_timer(self.node_id, self.agent.config.invoke_timeout, {
                'type': INVOKE_TIMER, 'invocation_id': action.invocation_id,
            })

    def _apply(self, result: InvocationResult, t: float) -> None:
        for request_id, success in self.agent.apply_outcome(result):
            self.complete(request_id, t, success, '' if success else 'failure')

    def live_state(self) -> LiveState:
        return self.agent.live_state()
