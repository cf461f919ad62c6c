"""
Interface commune des compositeurs exécutés par le simulateur.

Un compositeur est attaché à un nœud demandeur. Le simulateur lui remet les
requêtes, les messages, les minuteries, les ticks de cycle, les
notifications de départ et les lectures de zone; le compositeur répond par
des envois de messages et des minuteries.
"""

from typing import Any, Dict, List, Mapping, Optional, TYPE_CHECKING
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import logging

from ..perception.perception import CompositionRequest
from ..reporting.memory_meter import LiveState, MemorySampler, measure_memory
from .network import NetMessage

if TYPE_CHECKING:
    from .simulator import ManetSimulator

logger = logging.getLogger(__name__)

DEADLINE_TIMER = 'deadline'


@dataclass
class RequestOutcome:
    """Issue d'une requête de composition."""
    request_id: str
    composer: str
    requester: str
    issue_time: float
    end_time: float
    success: bool
    reason: str = ''
    invocations: int = 0
    mu_peak: float = 0.0
    mu_mean: float = 0.0

    @property
    def composition_time(self) -> float:
        return self.end_time - self.issue_time

    def as_dict(self) -> Dict[str, Any]:
        return {
            'request_id': self.request_id,
            'composer': self.composer,
            'requester': self.requester,
            'issue_time': round(self.issue_time, 6),
            'end_time': round(self.end_time, 6),
            'success': self.success,
            'reason': self.reason,
            'invocations': self.invocations,
            'mu_peak': round(self.mu_peak, 6),
            'mu_mean': round(self.mu_mean, 6),
        }


@dataclass
class OpenRequest:
    """Suivi d'une requête ouverte côté compositeur."""
    request: CompositionRequest
    sampler: MemorySampler = field(default_factory=MemorySampler)
    invocations: int = 0


class Composer(ABC):
    """
    Compositeur de services attaché à un nœud demandeur.

    Les sous-classes implémentent les crochets `handle_*`; la classe de base
    gère l'échéance des requêtes, l'échantillonnage mémoire et les issues.
    """

    name = 'composer'

    def __init__(self):
        self.sim: Optional['ManetSimulator'] = None
        self.node_id: Optional[str] = None
        self.open: Dict[str, OpenRequest] = {}
        self.outcomes: List[RequestOutcome] = []

    def attach(self, sim: 'ManetSimulator', node_id: str) -> None:
        self.sim = sim
        self.node_id = node_id

    @property
    def has_open_requests(self) -> bool:
        return bool(self.open)

    # Points d'entrée appelés par le simulateur

    def on_request(self, request: CompositionRequest, t: float) -> None:
        self.open[request.id] = OpenRequest(request)
        self.sim.schedule_timer(self.node_id, request.deadline, {'type': DEADLINE_TIMER, 'request_id': request.id})
        logger.debug(f"[{self.name}@{self.node_id}] requête {request.id} émise à {t:.3f}s")
        self.handle_request(request, t)

    def on_timer(self, payload: Mapping[str, Any], t: float) -> None:
        if payload.get('type') == DEADLINE_TIMER:
            request_id = payload['request_id']
            if request_id in self.open:
                self.handle_expiry(request_id, t)
                self.complete(request_id, t, False, 'deadline')
            return
        self.handle_timer(payload, t)

    def on_message(self, message: NetMessage, t: float) -> None:
        self.handle_message(message, t)

    def on_cycle(self, t: float) -> None:
        self.handle_cycle(t)

    def on_topology(self, departed_services: List[str], t: float) -> None:
        self.handle_departures(departed_services, t)

    def on_context(self, attribute: str, value: str, t: float) -> None:
        self.handle_context(attribute, value, t)

    def expire_all(self, t: float, reason: str = 'horizon') -> int:
        """Clôt en échec toutes les requêtes encore ouvertes."""
        request_ids = sorted(self.open)
        for request_id in request_ids:
            self.handle_expiry(request_id, t)
            self.complete(request_id, t, False, reason)
        return len(request_ids)

    def sample_memory(self) -> float:
        """Mesure l'état vif et l'attribue à chaque requête ouverte."""
        kilobytes = measure_memory(self.live_state())
        for record in self.open.values():
            record.sampler.add(kilobytes)
        return kilobytes

    def count_invocation(self, request_id: str) -> None:
        if request_id in self.open:
            self.open[request_id].invocations += 1

    def complete(self, request_id: str, t: float, success: bool, reason: str = '') -> Optional[RequestOutcome]:
        """Clôt une requête ouverte et enregistre son issue."""
        record = self.open.pop(request_id, None)
        if record is None:
            return None
        if not record.sampler.samples:
            record.sampler.add(measure_memory(self.live_state()))
        outcome = RequestOutcome(
            request_id=request_id,
            composer=self.name,
            requester=self.node_id or '',
            issue_time=record.request.issue_time,
            end_time=t,
            success=success,
            reason=reason,
            invocations=record.invocations,
            mu_peak=record.sampler.peak,
            mu_mean=record.sampler.mean,
        )
        self.outcomes.append(outcome)
        self.handle_closed(request_id, t)
        status = 'réussie' if success else f"échouée ({reason})"
        logger.debug(f"[{self.name}@{self.node_id}] requête {request_id} {status} à {t:.3f}s")
        return outcome

    # Crochets des sous-classes

    @abstractmethod
    def handle_request(self, request: CompositionRequest, t: float) -> None:
        """Prend en charge une nouvelle requête."""

    @abstractmethod
    def handle_message(self, message: NetMessage, t: float) -> None:
        """Traite un message reçu."""

    @abstractmethod
    def live_state(self) -> LiveState:
        """Vue structurelle de l'état vif, pour la mesure mémoire."""

    def handle_timer(self, payload: Mapping[str, Any], t: float) -> None:
        pass

    def handle_cycle(self, t: float) -> None:
        pass

    def handle_departures(self, departed_services: List[str], t: float) -> None:
        pass

    def handle_context(self, attribute: str, value: str, t: float) -> None:
        pass

    def handle_expiry(self, request_id: str, t: float) -> None:
        pass

    def handle_closed(self, request_id: str, t: float) -> None:
        pass
