"""
Agent cognitif COPERNIC: le cycle perception-action.

Chaque cycle enchaîne perception, mémoire de travail, indiçage des mémoires
déclaratives, attention par le réseau de comportements, découverte
procédurale et sélection d'action. Aucun plan n'est stocké: la composition
émerge de la succession des cycles et ne se reconstruit qu'à partir du
journal d'actions.
"""

from typing import Any, Counter as CounterType, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple
from dataclasses import dataclass, field
from collections import Counter
import logging

import numpy as np

from ..attention.behavior_network import (
    BehaviorNetwork,
    SpreadFractions,
    activation_step,
    build_network,
    select_behavior,
)
from ..exceptions.composition_exceptions import AgentError
from ..memory.episodic_sdm import EpisodicRecord, SparseDistributedMemory
from ..memory.semantic_slipnet import Slipnet, slipnet_from_catalog
from ..memory.working_memory import DECLARATIVE_SOURCE, OUTCOME_SOURCE, PERCEPT_SOURCE, WorkingMemory
from ..perception.perception import (
    CONTEXT_READING,
    QOS_READING,
    SERVICE_ADVERT,
    USER_REQUEST,
    CompositionRequest,
    Percept,
    SensoryEvent,
    perceive,
)
from ..procedural.procedural_memory import ProceduralMemory
from ..reporting.memory_meter import LiveState
from ..services.catalog import AVAILABLE, DEPARTED, FAILED, QOS_OBSERVED, ServiceCatalog
from ..services.service_model import ConcreteService, Premise, QoSCaps, QoSVector, QoSWeights
from .actions import NO_OP, Action, ActionKind, InvocationResult

logger = logging.getLogger(__name__)

# Lissage de la fiabilité observée
RELIABILITY_SMOOTHING = 0.5


@dataclass(frozen=True)
class AgentConfig:
    """Paramètres du cycle cognitif."""
    cycle_period: float = 0.1
    blacklist_cycles: int = 5
    invoke_timeout: float = 2.0
    declarative_strength: float = 0.5
    attention_gating: bool = True


@dataclass
class RequestState:
    """Suivi d'une requête ouverte: état atteint, buts protégés, régime actif."""
    request: CompositionRequest
    state: Set[Premise]
    regime: str
    protected_goals: Set[Premise] = field(default_factory=set)
    blacklist: Dict[str, int] = field(default_factory=dict)
    pending: Optional[str] = None

    @property
    def achieved(self) -> bool:
        return self.request.goals <= self.state


@dataclass
class PendingInvocation:
    invocation_id: str
    request_id: str
    service_id: str
    cycle: int
    time: float


class CopernicAgent:
    """
    Agent de composition à architecture cognitive.

    Args:
        catalog: Catalogue des services connus (hôtes renseignés)
        wm: Mémoire de travail
        sdm: Mémoire épisodique
        slipnet: Mémoire sémantique
        bn: Réseau de comportements
        pm: Mémoire procédurale
        config: Paramètres du cycle
        salience: Saillance par type d'événement
        agent_id: Identifiant utilisé dans les identifiants d'invocation
    """

    def __init__(
        self,
        catalog: ServiceCatalog,
        wm: WorkingMemory,
        sdm: SparseDistributedMemory,
        slipnet: Slipnet,
        bn: BehaviorNetwork,
        pm: ProceduralMemory,
        config: AgentConfig = AgentConfig(),
        salience: Optional[Mapping[str, float]] = None,
        agent_id: str = 'agent',
    ):
        self.catalog = catalog
        self.wm = wm
        self.em = sdm
        self.sm = slipnet
        self.bn = bn
        self.pm = pm
        self.config = config
        self.salience = dict(salience or {})
        self.agent_id = agent_id
        self.requests: Dict[str, RequestState] = {}
        self.pending: Dict[str, PendingInvocation] = {}
        self.observed: Dict[str, QoSVector] = {}
        self.diagnostics: CounterType[str] = Counter()
        self.action_log: List[Dict[str, Any]] = []
        self.trace: List[Dict[str, Any]] = []
        self.cycle_count = 0
        self.last_time = 0.0
        self._internal_events: List[SensoryEvent] = []
        self._invocations = 0

    @classmethod
    def from_settings(
        cls,
        catalog: ServiceCatalog,
        settings: Mapping[str, Any],
        rng: np.random.Generator,
        agent_id: str = 'agent',
    ) -> 'CopernicAgent':
        """Construit un agent depuis la configuration fusionnée."""
        wm = WorkingMemory(**settings['working_memory'])
        sdm = SparseDistributedMemory.from_settings(settings['episodic_memory'])
        slipnet = slipnet_from_catalog(catalog, **settings['semantic_memory'])
        network = settings['behavior_network']
        fractions = SpreadFractions(
            forward=network['forward_fraction'],
            backward=network['backward_fraction'],
            conflict=network['conflict_fraction'],
            threshold_decay=network['threshold_decay'],
        )
        service_model = settings['service_model']
        pm = ProceduralMemory.from_settings(
            settings['procedural_memory'],
            rng,
            weights=QoSWeights(**service_model['qos_weights']),
            caps=QoSCaps(**service_model['qos_caps']),
        )
        regime = pm.regimes[0]
        bn = build_network(list(catalog.abstracts.values()), regime.params, fractions)
        return cls(
            catalog=catalog,
            wm=wm,
            sdm=sdm,
            slipnet=slipnet,
            bn=bn,
            pm=pm,
            config=AgentConfig(**settings['agent']),
            salience=settings['perception']['salience'],
            agent_id=agent_id,
        )

    # Requêtes

    def _register(self, request: CompositionRequest) -> Action:
        regime = self.pm.choose()
        self.bn.set_params(regime.params)
        self.requests[request.id] = RequestState(request, set(request.context), regime.name)
        logger.debug(f"[{self.agent_id}] requête {request.id}: régime {regime.name}")
        return Action(ActionKind.SET_GOAL, request_id=request.id, goals=request.goals)

    def close_request(self, request_id: str, success: bool) -> None:
        """Clôt une requête et récompense le régime actif pendant celle-ci."""
        record = self.requests.pop(request_id, None)
        if record is None:
            return
        self.pm.reward(record.regime, 1.0 if success else 0.0)

    def expire(self, request_id: str, t: float) -> None:
        if request_id in self.requests:
            self.diagnostics['expired'] += 1
            self.close_request(request_id, False)

    @property
    def open_requests(self) -> List[CompositionRequest]:
        return [record.request for record in self.requests.values()]

    def goals(self) -> FrozenSet[Premise]:
        result: Set[Premise] = set()
        for record in self.requests.values():
            result |= record.request.goals
        return frozenset(result)

    def _still_needed(self, record: RequestState) -> Set[Premise]:
        """
        Prémisses atteintes encore utiles à une requête.

        Union des buts protégés de la requête (sous-ensemble des buts
        atteints) et des prémisses atteintes qui sont préconditions d'un
        service abstrait de la chaîne restante. Seuls les premiers sont des
        buts protégés au sens de la requête; les secondes ne sont gardées que
        comme entrée δ du réseau et relues comme contexte interne.
        """
        remaining = record.request.goals - record.state
        needed: Set[Premise] = set()
        for abstract_id in self.catalog.goal_chain(remaining, record.state):
            needed |= self.catalog.abstracts[abstract_id].pre
        return set(record.protected_goals) | (record.state & needed)

    def protected(self) -> FrozenSet[Premise]:
        """Entrée δ du réseau: prémisses atteintes et encore utiles de toutes les requêtes ouvertes."""
        result: Set[Premise] = set()
        for record in self.requests.values():
            result |= self._still_needed(record)
        return frozenset(result)

    # Cycle cognitif

    def _internal_readings(self, t_now: float) -> List[SensoryEvent]:
        """Relecture du contexte utilisateur: prémisses atteintes encore utiles."""
        events = []
        for request_id in sorted(self.requests):
            for premise in sorted(self._still_needed(self.requests[request_id])):
                events.append(SensoryEvent(CONTEXT_READING, {'premise': premise}, t_now))
        return events

    def _relevant_abstracts(self) -> Set[str]:
        """Services abstraits de la chaîne restante des requêtes ouvertes."""
        result: Set[str] = set()
        for record in self.requests.values():
            result.update(self.catalog.goal_chain(record.request.goals - record.state, record.state))
        return result

    def _passes_attention(self, percept: Percept, relevant: Set[str]) -> bool:
        if not self.config.attention_gating or not self.requests or percept.source != SERVICE_ADVERT:
            return True
        premise = percept.premise
        if premise.predicate == AVAILABLE:
            abstract_id = self.catalog.abstract_of(premise.args[0])
        else:
            abstract_id = premise.args[0]
        if abstract_id in relevant:
            return True
        behavior = self.bn.behaviors.get(abstract_id) if abstract_id else None
        return behavior is not None and behavior.activation >= self.bn.params.pi

    def _inject_percepts(self, percepts: Sequence[Percept], t_now: float) -> None:
        relevant = self._relevant_abstracts()
        for percept in percepts:
            premise = percept.premise
            if not self._passes_attention(percept, relevant):
                self.diagnostics['filtered_adverts'] += 1
                continue
            if premise.predicate == QOS_OBSERVED:
                # la QoS observée ne sert qu'au classement des services concrets
                continue
            if premise.predicate == AVAILABLE:
                self.wm.discard(Premise(DEPARTED, premise.args))
            elif premise.predicate == DEPARTED:
                self.wm.discard(Premise(AVAILABLE, premise.args))
            self.wm.inject(premise, t_now, percept.salience, PERCEPT_SOURCE)

    def _context(self, contents: Sequence[Premise]) -> Dict[str, str]:
        keys = set(self.catalog.context_keys)
        return {p.predicate: p.args[0] for p in contents if p.predicate in keys and len(p.args) == 1}

    def live_services(self, contents: Sequence[Premise]) -> List[ConcreteService]:
        """Services annoncés disponibles et non partis selon la mémoire de travail."""
        present = set(contents)
        result = []
        for premise in contents:
            if premise.predicate != AVAILABLE or Premise(DEPARTED, premise.args) in present:
                continue
            service = self.catalog.concrete(premise.args[0])
            if service is not None and service.host is not None:
                result.append(service)
        return sorted(result, key=lambda service: service.id)

    def _bind_request(self, behavior_id: str) -> Optional[RequestState]:
        behavior = self.bn.behaviors[behavior_id]
        for request_id in sorted(self.requests, key=lambda r: (self.requests[r].request.issue_time, r)):
            record = self.requests[request_id]
            if record.pending is not None:
                continue
            if behavior.preconditions <= record.state and not behavior.add_list <= record.state:
                return record
        return None

    def run_cycle(self, events: Sequence[SensoryEvent], t_now: float) -> List[Action]:
        """
        Exécute un cycle cognitif.

        Returns:
            Actions du cycle: `set-goal` pour chaque nouvelle requête, puis au
            plus une invocation; `[no-op]` si rien d'autre n'est émis
        """
        if t_now < self.last_time:
            raise AgentError(f"Cycle dans le passé: {t_now} < {self.last_time}")
        self.last_time = t_now
        self.cycle_count += 1
        self.em.reset_touched()
        actions: List[Action] = []

        incoming = list(events) + self._internal_events
        self._internal_events = []
        for event in incoming:
            if event.kind == USER_REQUEST and event.payload['request'].id not in self.requests:
                actions.append(self._register(event.payload['request']))
            elif event.kind == QOS_READING:
                self._observe_qos(event.payload)

        # 1-2: perception puis mémoire de travail; l'état relu est rafraîchi
        # avant les annonces du cycle
        internal = perceive(self._internal_readings(t_now), self.catalog, self.diagnostics, self.salience)
        self._inject_percepts(internal, t_now)
        percepts = perceive(incoming, self.catalog, self.diagnostics, self.salience)
        self._inject_percepts(percepts, t_now)

        # 3: indiçage des mémoires déclaratives
        contents = self.wm.contents(t_now)
        declarative = set(self.em.cue(contents, t_now, self.catalog.context_keys)) | self.sm.cue(contents)
        for premise in sorted(declarative):
            if premise in self.catalog.universe:
                self.wm.inject(premise, t_now, self.config.declarative_strength, DECLARATIVE_SOURCE)
            else:
                self.diagnostics['outside_universe'] += 1
        self.wm.prune(t_now)
        contents = self.wm.contents(t_now)
        state = frozenset(contents)

        # 4-5: attention
        activation_step(self.bn, state, self.goals(), self.protected())
        selected = select_behavior(self.bn, state)

        # 6: découverte procédurale et action
        if selected is not None:
            actions.append(self._act(selected, contents, t_now))
        if not actions:
            actions.append(NO_OP)

        for action in actions:
            self.action_log.append({'time': round(t_now, 6), 'cycle': self.cycle_count, **action.as_dict()})
        self.trace.append({
            'time': round(t_now, 6),
            'cycle': self.cycle_count,
            'wm_size': len(contents),
            'selected': selected,
            'regime': [self.requests[r].regime for r in sorted(self.requests)],
            'theta_current': round(self.bn.params.theta_current, 6),
            'actions': [action.kind.value for action in actions],
        })
        return actions

    def _act(self, behavior_id: str, contents: Sequence[Premise], t_now: float) -> Action:
        record = self._bind_request(behavior_id)
        if record is None:
            self.diagnostics['redundant_selection'] += 1
            return Action(ActionKind.NO_OP, reason='no-request')
        abstract = self.catalog.abstracts[behavior_id]
        live = [
            service for service in self.live_services(contents)
            if record.blacklist.get(service.id, 0) < self.cycle_count
        ]
        candidates = self.pm.discover(abstract, live, contents, self.observed)
        if not candidates:
            self.diagnostics['replan'] += 1
            return Action(ActionKind.NO_OP, request_id=record.request.id, reason='replan')
        chosen = candidates[0]
        self._invocations += 1
        invocation_id = f"{self.agent_id}-inv-{self._invocations:05d}"
        self.pending[invocation_id] = PendingInvocation(invocation_id, record.request.id, chosen.id, self.cycle_count, t_now)
        record.pending = invocation_id
        return Action(
            ActionKind.INVOKE_CONCRETE,
            request_id=record.request.id,
            service_id=chosen.id,
            host=chosen.host,
            invocation_id=invocation_id,
        )

    # Résultats d'invocation

    def _observe_qos(self, payload: Mapping[str, Any]) -> None:
        service = self.catalog.concrete(str(payload['service_id']))
        if service is None:
            return
        base = self.observed.get(service.id, service.qos)
        self.observed[service.id] = QoSVector(
            latency=float(payload.get('latency', base.latency)),
            reliability=min(max(float(payload['reliability']), 0.0), 1.0),
            cost=float(payload.get('cost', base.cost)),
            energy=float(payload.get('energy', base.energy)),
        )

    def apply_outcome(self, result: InvocationResult) -> List[Tuple[str, bool]]:
        """
        Intègre le résultat d'une invocation.

        Returns:
            Requêtes terminées par ce résultat, avec leur succès

        Raises:
            AgentError: Si l'identifiant d'invocation est inconnu
        """
        pending = self.pending.pop(result.invocation_id, None)
        if pending is None:
            raise AgentError(f"Invocation inconnue: {result.invocation_id}")
        service = self.catalog.concretes[pending.service_id]
        record = self.requests.get(pending.request_id)
        if record is not None and record.pending == result.invocation_id:
            record.pending = None

        t = result.time
        contents = self.wm.contents(t)
        observed = result.observed_qos or service.qos
        self.em.record(EpisodicRecord(
            service=service.id,
            context=self._context(contents),
            outcome=result.outcome,
            observed_qos=observed,
            time=t,
        ))
        previous = self.observed.get(service.id, service.qos).reliability
        reliability = (1 - RELIABILITY_SMOOTHING) * previous + RELIABILITY_SMOOTHING * (1.0 if result.success else 0.0)
        self._internal_events.append(SensoryEvent(QOS_READING, {
            'service_id': service.id,
            'reliability': reliability,
            'latency': observed.latency,
            'cost': observed.cost,
            'energy': observed.energy,
        }, t))

        completed: List[Tuple[str, bool]] = []
        if not result.success:
            self.wm.inject(Premise(FAILED, (service.id,)), t, 1.0, OUTCOME_SOURCE)
            if record is not None:
                record.blacklist[service.id] = self.cycle_count + self.config.blacklist_cycles
            self.diagnostics[f"invocation_{result.outcome}"] += 1
            return completed

        for premise in sorted(service.negative):
            self.wm.discard(premise)
        for premise in sorted(service.postc):
            self.wm.inject(premise, t, 1.0, OUTCOME_SOURCE)
        if record is None:
            return completed
        record.state -= service.negative
        record.state |= service.postc
        # un but effacé par une liste de suppression n'est plus protégé
        record.protected_goals = record.request.goals & record.state
        if record.achieved:
            self.close_request(record.request.id, True)
            completed.append((record.request.id, True))
        return completed

    def expired_invocations(self, t_now: float) -> List[str]:
        return sorted(
            invocation_id for invocation_id, pending in self.pending.items()
            if t_now - pending.time >= self.config.invoke_timeout
        )

    def live_state(self) -> LiveState:
        return LiveState(
            wm_items=[(item.premise, len(item.access_times)) for item in self.wm.items.values()],
            sdm_touched=len(self.em.touched),
            sdm_dimension=self.em.dimension,
            bn_behaviors=len(self.bn.behaviors),
            slipnet_active=self.sm.active_node_count(),
        )
