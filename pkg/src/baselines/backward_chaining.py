"""
Compositeurs de référence par chaînage arrière décentralisé.

Deux variantes partagent la découverte coopérative: une requête de
découverte est inondée pour les prémisses non résolues, les fournisseurs
dont les postconditions couvrent une prémisse répondent, et chaque prémisse
reçoit un fragment de plan dont le résolveur est choisi par l'heuristique
(préconditions restantes, nombre de sauts, identifiant).

- GoCoMo-like: conserve les meilleurs candidats de chaque fragment et
  répare le plan à l'exécution (candidat de rechange puis redécouverte).
- CoopC-like: conserve tous les candidats, réserve les fournisseurs par un
  tour d'engagement et gèle le plan; toute perte à l'exécution est un échec.

L'heuristique (préconditions restantes, sauts) est une approximation
documentée: la fonction exacte de GoCoMo n'est pas publiée.
"""

from typing import Any, Dict, List, Mapping, Optional, Set, Tuple
from dataclasses import dataclass, field
import logging

from ..exceptions.composition_exceptions import PlanningError
from ..perception.perception import CompositionRequest
from ..reporting.memory_meter import LiveState
from ..services.service_model import Premise, PremiseSet, premises
from ..simulation.composer import Composer, RequestOutcome
from ..simulation.network import ADVERT, DISCOVERY, INVOKE, RESPONSE, NetMessage

logger = logging.getLogger(__name__)

DISCOVERY_PHASE = 'discovery'
COMMIT_PHASE = 'commit'
EXECUTION_PHASE = 'execution'

WINDOW_TIMER = 'discovery-window'
COMMIT_TIMER = 'commit-timeout'
INVOKE_TIMER = 'invoke-timeout'

PLANNING_FAILURE = 'planning'
EXECUTION_FAILURE = 'execution'


@dataclass(frozen=True)
class Candidate:
    """Service proposé par un fournisseur pour une prémisse."""
    service_id: str
    host: str
    hops: int
    prec: PremiseSet
    postc: PremiseSet


@dataclass
class BackwardPlanFragment:
    """
    Fragment de plan: une prémisse but et le service qui la produit.

    Args:
        goal: Prémisse à produire
        resolver: Service concret retenu
        remaining: Préconditions du résolveur encore non résolues au choix
        hops: Distance en sauts du fournisseur à la découverte
        alternatives: Candidats de rechange conservés
    """
    goal: Premise
    resolver: Candidate
    remaining: PremiseSet
    hops: int
    alternatives: List[Candidate] = field(default_factory=list)


@dataclass(frozen=True)
class BaselineConfig:
    """Paramètres communs des compositeurs de référence."""
    discovery_window: float = 0.1
    fragment_timeout: float = 2.0
    invoke_timeout: float = 2.0
    candidates_kept: Optional[int] = 3

    @classmethod
    def from_settings(cls, section: Mapping[str, Any]) -> 'BaselineConfig':
        return cls(
            discovery_window=float(section.get('discovery_window', 0.1)),
            fragment_timeout=float(section.get('fragment_timeout', 2.0)),
            invoke_timeout=float(section.get('invoke_timeout', 2.0)),
            candidates_kept=section.get('candidates_kept', 3),
        )


@dataclass
class PlanState:
    """État de planification et d'exécution d'une requête."""
    request: CompositionRequest
    state: Set[Premise]
    fragments: Dict[Premise, BackwardPlanFragment] = field(default_factory=dict)
    unresolved: Dict[Premise, float] = field(default_factory=dict)
    excluded: Set[str] = field(default_factory=set)
    phase: str = DISCOVERY_PHASE
    query_id: Optional[str] = None
    responses: List[Candidate] = field(default_factory=list)
    awaiting_acks: Set[str] = field(default_factory=set)
    invocation_id: Optional[str] = None
    current: Optional[Premise] = None
    rounds: int = 0
    invocations: int = 0

    def plan(self) -> List[BackwardPlanFragment]:
        """Fragments non encore exécutés."""
        return [
            self.fragments[goal] for goal in sorted(self.fragments)
            if goal not in self.state
        ]


def candidate_key(candidate: Candidate, known: Set[Premise]) -> Tuple[int, int, str]:
    """Heuristique: moins de préconditions restantes, puis moins de sauts."""
    return (len(candidate.prec - known), candidate.hops, candidate.service_id)


def order_plan(fragments: Mapping[Premise, BackwardPlanFragment], state: Set[Premise]) -> List[BackwardPlanFragment]:
    """
    Ordonne les fragments en plan d'exécution avant.

    Raises:
        PlanningError: Si un fragment ne devient jamais exécutable
    """
    simulated = set(state)
    pending = [fragments[goal] for goal in sorted(fragments) if goal not in state]
    ordered: List[BackwardPlanFragment] = []
    while pending:
        ready = [fragment for fragment in pending if fragment.resolver.prec <= simulated]
        if not ready:
            raise PlanningError(f"Plan inexécutable: {[str(f.goal) for f in pending]}")
        fragment = ready[0]
        ordered.append(fragment)
        pending.remove(fragment)
        simulated |= fragment.resolver.postc
    return ordered


class BackwardChainingComposer(Composer):
    """
    Base des compositeurs par chaînage arrière.

    Les sous-classes fixent la conservation des candidats, le tour
    d'engagement et la réaction à une perte pendant l'exécution.
    """

    name = 'backward'
    adaptive = True
    commits = False

    def __init__(self, config: Optional[BaselineConfig] = None):
        super().__init__()
        self.config = config or BaselineConfig()
        self.plans: Dict[str, PlanState] = {}
        self.departed: Set[str] = set()
        self._counter = 0

    def _fresh_id(self, request_id: str, tag: str) -> str:
        self._counter += 1
        return f"{request_id}:{tag}{self._counter}"

    # Planification

    def handle_request(self, request: CompositionRequest, t: float) -> None:
        plan = PlanState(request, set(request.context))
        self.plans[request.id] = plan
        for goal in sorted(request.goals - plan.state):
            plan.unresolved[goal] = t
        if not plan.unresolved:
            self.complete(request.id, t, True)
            return
        self._discover(plan, t)

    def _discover(self, plan: PlanState, t: float) -> None:
        plan.phase = DISCOVERY_PHASE
        plan.rounds += 1
        plan.responses = []
        plan.query_id = self._fresh_id(plan.request.id, 'q')
        wanted = sorted(str(p) for p in plan.unresolved)
        reached = self.sim.flood(self.node_id, DISCOVERY, {
            'type': 'query', 'query_id': plan.query_id, 'premises': wanted,
        })
        logger.debug(f"[{self.name}@{self.node_id}] découverte {plan.query_id} pour {wanted} ({reached} nœuds)")
        self.sim.schedule_timer(self.node_id, self.config.discovery_window, {
            'type': WINDOW_TIMER, 'request_id': plan.request.id, 'query_id': plan.query_id,
        })

    def _known(self, plan: PlanState) -> Set[Premise]:
        return set(plan.state) | set(plan.fragments) | set(plan.unresolved)

    def _close_window(self, plan: PlanState, t: float) -> None:
        plan.query_id = None
        for goal in sorted(plan.unresolved):
            candidates = [
                candidate for candidate in plan.responses
                if goal in candidate.postc
                and candidate.service_id not in plan.excluded
                and candidate.service_id not in self.departed
            ]
            if not candidates:
                continue
            known = set(plan.state) | set(plan.fragments)
            candidates = sorted(set(candidates), key=lambda c: candidate_key(c, known))
            chosen = candidates[0]
            kept = candidates[1:]
            if self.config.candidates_kept is not None:
                kept = kept[:max(self.config.candidates_kept - 1, 0)]
            remaining = frozenset(chosen.prec - known)
            plan.fragments[goal] = BackwardPlanFragment(goal, chosen, remaining, chosen.hops, kept)
            del plan.unresolved[goal]
            for premise in sorted(remaining):
                if premise not in self._known(plan):
                    plan.unresolved[premise] = t
        plan.responses = []

        expired = [goal for goal, since in plan.unresolved.items() if t - since >= self.config.fragment_timeout]
        if expired:
            logger.debug(f"[{self.name}@{self.node_id}] aucun fournisseur pour {sorted(map(str, expired))}")
            self._fail(plan, t, PLANNING_FAILURE)
            return
        if plan.unresolved:
            self._discover(plan, t)
            return
        if self.commits and plan.phase == DISCOVERY_PHASE and plan.invocations == 0:
            self._commit(plan, t)
            return
        self._execute_next(plan, t)

    def _commit(self, plan: PlanState, t: float) -> None:
        plan.phase = COMMIT_PHASE
        plan.query_id = self._fresh_id(plan.request.id, 'c')
        plan.awaiting_acks = set()
        for fragment in plan.plan():
            service_id = fragment.resolver.service_id
            if self.sim.send(self.node_id, fragment.resolver.host, DISCOVERY, {
                'type': 'commit', 'query_id': plan.query_id, 'service_id': service_id,
            }):
                plan.awaiting_acks.add(service_id)
            else:
                self._fail(plan, t, PLANNING_FAILURE)
                return
        self.sim.schedule_timer(self.node_id, self.config.fragment_timeout, {
            'type': COMMIT_TIMER, 'request_id': plan.request.id, 'query_id': plan.query_id,
        })

    # Exécution

    def _execute_next(self, plan: PlanState, t: float) -> None:
        plan.phase = EXECUTION_PHASE
        if plan.request.goals <= plan.state:
            self.complete(plan.request.id, t, True)
            return
        try:
            ordered = order_plan(plan.fragments, plan.state)
        except PlanningError as e:
            logger.debug(f"[{self.name}@{self.node_id}] {e}")
            self._fail(plan, t, PLANNING_FAILURE)
            return
        if not ordered:
            self._fail(plan, t, PLANNING_FAILURE)
            return
        fragment = ordered[0]
        plan.current = fragment.goal
        plan.invocation_id = self._fresh_id(plan.request.id, 'i')
        plan.invocations += 1
        self.count_invocation(plan.request.id)
        sent = self.sim.send(self.node_id, fragment.resolver.host, INVOKE, {
            'invocation_id': plan.invocation_id,
            'service_id': fragment.resolver.service_id,
            'request_id': plan.request.id,
        })
        if not sent:
            self._lost(plan, fragment, t)
            return
        self.sim.schedule_timer(self.node_id, self.config.invoke_timeout, {
            'type': INVOKE_TIMER, 'request_id': plan.request.id, 'invocation_id': plan.invocation_id,
        })

    def _succeeded(self, plan: PlanState, t: float) -> None:
        fragment = plan.fragments[plan.current]
        service = self.sim.catalog.concretes.get(fragment.resolver.service_id)
        if service is not None:
            plan.state -= set(service.negative)
        plan.state |= fragment.resolver.postc
        plan.current = None
        plan.invocation_id = None
        self._execute_next(plan, t)

    def _lost(self, plan: PlanState, fragment: BackwardPlanFragment, t: float) -> None:
        """Perte du résolveur d'un fragment pendant l'exécution."""
        plan.current = None
        plan.invocation_id = None
        if not self.adaptive:
            self._fail(plan, t, EXECUTION_FAILURE)
            return
        plan.excluded.add(fragment.resolver.service_id)
        spare = [
            candidate for candidate in fragment.alternatives
            if candidate.service_id not in plan.excluded and candidate.service_id not in self.departed
        ]
        if spare:
            chosen = spare[0]
            fragment.alternatives = spare[1:]
            fragment.resolver = chosen
            fragment.hops = chosen.hops
            logger.debug(f"[{self.name}@{self.node_id}] réparation locale de {fragment.goal} par {chosen.service_id}")
            self._execute_next(plan, t)
            return
        del plan.fragments[fragment.goal]
        plan.unresolved[fragment.goal] = t
        logger.debug(f"[{self.name}@{self.node_id}] redécouverte du fragment {fragment.goal}")
        self._discover(plan, t)

    def _fail(self, plan: PlanState, t: float, reason: str) -> None:
        self.complete(plan.request.id, t, False, reason)

    # Messages et minuteries

    def handle_message(self, message: NetMessage, t: float) -> None:
        data = message.payload
        if message.kind == ADVERT:
            self.departed.difference_update(data.get('services', ()))
            return
        if message.kind != RESPONSE:
            return
        kind = data.get('type')
        if kind == 'discovery':
            plan = self._plan_for_query(data['query_id'])
            if plan is None or plan.phase != DISCOVERY_PHASE:
                return
            for record in data['services']:
                plan.responses.append(Candidate(
                    service_id=record['id'],
                    host=record['host'],
                    hops=int(record['hops']),
                    prec=premises(record.get('prec', [])),
                    postc=premises(record.get('postc', [])),
                ))
        elif kind == 'commit':
            plan = self._plan_for_query(data['query_id'])
            if plan is None or plan.phase != COMMIT_PHASE:
                return
            if not data['ok']:
                self._fail(plan, t, PLANNING_FAILURE)
                return
            plan.awaiting_acks.discard(data['service_id'])
            if not plan.awaiting_acks:
                plan.query_id = None
                self._execute_next(plan, t)
        elif kind == 'invoke':
            plan = self.plans.get(data.get('request_id') or '')
            if plan is None or plan.invocation_id != data['invocation_id']:
                return
            if data['success']:
                self._succeeded(plan, t)
            else:
                self._lost(plan, plan.fragments[plan.current], t)

    def _plan_for_query(self, query_id: str) -> Optional[PlanState]:
        for plan in self.plans.values():
            if plan.query_id == query_id:
                return plan
        return None

    def handle_timer(self, payload: Mapping[str, Any], t: float) -> None:
        plan = self.plans.get(payload.get('request_id', ''))
        if plan is None:
            return
        kind = payload.get('type')
        if kind == WINDOW_TIMER and plan.query_id == payload['query_id'] and plan.phase == DISCOVERY_PHASE:
            self._close_window(plan, t)
        elif kind == COMMIT_TIMER and plan.query_id == payload['query_id'] and plan.phase == COMMIT_PHASE:
            self._fail(plan, t, PLANNING_FAILURE)
        elif kind == INVOKE_TIMER and plan.invocation_id == payload['invocation_id']:
            self._lost(plan, plan.fragments[plan.current], t)

    def handle_departures(self, departed_services: List[str], t: float) -> None:
        self.departed.update(departed_services)
        for request_id in sorted(self.plans):
            plan = self.plans.get(request_id)
            if plan is None or plan.phase != EXECUTION_PHASE:
                continue
            if not self.adaptive:
                # plan gelé: la perte de tout fournisseur restant est fatale
                if any(f.resolver.service_id in self.departed for f in plan.plan()):
                    self._fail(plan, t, EXECUTION_FAILURE)
                continue
            if plan.current is None:
                continue
            fragment = plan.fragments[plan.current]
            if fragment.resolver.service_id in departed_services:
                self._lost(plan, fragment, t)

    def handle_closed(self, request_id: str, t: float) -> None:
        self.plans.pop(request_id, None)

    def live_state(self) -> LiveState:
        fragments: List[Tuple[Premise, ...]] = []
        plan_entries: List[Tuple[str, Tuple[Premise, ...]]] = []
        for request_id in sorted(self.plans):
            plan = self.plans[request_id]
            for goal in sorted(plan.fragments):
                fragment = plan.fragments[goal]
                fragments.append((fragment.goal,) + tuple(sorted(fragment.remaining)))
                for candidate in fragment.alternatives:
                    fragments.append((fragment.goal,) + tuple(sorted(candidate.prec)))
            for candidate in plan.responses:
                fragments.append(tuple(sorted(candidate.postc | candidate.prec)))
            for fragment in plan.plan():
                resolver = fragment.resolver
                plan_entries.append((resolver.service_id, tuple(sorted(resolver.prec | resolver.postc))))
        return LiveState(fragments=fragments, plan=plan_entries)


class GoCoMoComposer(BackwardChainingComposer):
    """Planificateur GoCoMo-like avec adaptation à l'exécution."""

    name = 'gocomo'
    adaptive = True
    commits = False


class CoopCComposer(BackwardChainingComposer):
    """Compositeur CoopC-like coopératif, sans adaptation à l'exécution."""

    name = 'coopc'
    adaptive = False
    commits = True

    def __init__(self, config: Optional[BaselineConfig] = None):
        config = config or BaselineConfig()
        super().__init__(BaselineConfig(
            discovery_window=config.discovery_window,
            fragment_timeout=config.fragment_timeout,
            invoke_timeout=config.invoke_timeout,
            candidates_kept=None,
        ))


def _compose(composer_cls, request: CompositionRequest, sim, config: Optional[BaselineConfig]) -> RequestOutcome:
    composer = sim.composers.get(request.requester)
    if not isinstance(composer, composer_cls):
        composer = composer_cls(config)
        sim.add_composer(request.requester, composer)
    sim.start()
    sim.schedule_request(request)
    while True:
        for outcome in composer.outcomes:
            if outcome.request_id == request.id:
                return outcome
        if sim.peek_time() is None:
            raise PlanningError(f"Simulation terminée sans issue pour {request.id}")
        sim.step()


def gocomo_compose(request: CompositionRequest, sim, config: Optional[BaselineConfig] = None) -> RequestOutcome:
    """
    Compose une requête avec le planificateur GoCoMo-like.

    Le simulateur est exécuté jusqu'à l'issue de la requête (succès, échec ou
    échéance).

    Args:
        request: Requête émise par un nœud demandeur du simulateur
        sim: Simulateur MANET
        config: Paramètres des compositeurs de référence

    Returns:
        RequestOutcome: Issue de la requête
    """
    return _compose(GoCoMoComposer, request, sim, config)


def coopc_compose(request: CompositionRequest, sim, config: Optional[BaselineConfig] = None) -> RequestOutcome:
    """Compose une requête avec le compositeur CoopC-like (plan gelé)."""
    return _compose(CoopCComposer, request, sim, config)
